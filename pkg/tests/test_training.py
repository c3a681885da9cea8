import numpy as np
import pytest

from scenescore.midi import note_density, read_midi
from scenescore.remi import Vocabulary, tokenize
from scenescore.synthetic import (
    QUADRANT_VA,
    corpus_to_bars,
    make_corpus,
    quadrant_bar,
    read_labels_csv,
    write_corpus_dir,
)
from scenescore.vae.config import VaeConfig
from scenescore.vae.losses import MissingLabelsError
from scenescore.vae.training import (
    DivergedLossError,
    EmptyCorpusError,
    LabeledBar,
    clip_gradients,
    history_to_csv,
    kl_beta,
    make_batch,
    pad_tokens,
    train,
)


def tiny_config(**overrides) -> VaeConfig:
    base = dict(
        vocab_size=244,
        embed_dim=8,
        hidden_dim=12,
        latent_dim=4,
        probe_hidden=4,
        max_seq_len=48,
        epochs=2,
        batch_size=8,
        seed=0,
    )
    base.update(overrides)
    return VaeConfig(**base)


@pytest.fixture(scope="module")
def tiny_corpus():
    return corpus_to_bars(make_corpus(12, seed=0), Vocabulary())


class TestKlBeta:
    def test_linear_ramp(self):
        cfg = tiny_config(beta_kl=0.1, kl_anneal_epochs=10)
        assert kl_beta(cfg, 1) == pytest.approx(0.01)
        assert kl_beta(cfg, 5) == pytest.approx(0.05)
        assert kl_beta(cfg, 10) == pytest.approx(0.1)
        assert kl_beta(cfg, 25) == pytest.approx(0.1)

    def test_no_annealing(self):
        cfg = tiny_config(beta_kl=0.2, kl_anneal_epochs=0)
        assert kl_beta(cfg, 1) == pytest.approx(0.2)


class TestBatching:
    def test_pad_tokens(self):
        bars = [LabeledBar(tokens=[3, 4, 5]), LabeledBar(tokens=[3])]
        tokens, lengths = pad_tokens(bars)
        assert tokens.tolist() == [[3, 4, 5], [3, 0, 0]]
        assert lengths.tolist() == [3, 1]

    def test_labels_only_when_needed(self):
        bars = [LabeledBar(tokens=[3, 4]), LabeledBar(tokens=[3, 5])]
        batch = make_batch(bars, tiny_config())
        assert batch.v_gt is None and batch.va is None

    def test_quadrant_labels_materialized(self):
        bars = [
            LabeledBar(tokens=[3, 4], quadrant=1, va=(0.5, 0.5)),
            LabeledBar(tokens=[3, 5], quadrant=3, va=(-0.5, -0.5)),
        ]
        batch = make_batch(bars, tiny_config(lambda_disc=1.0, lambda_cont=0.5))
        assert batch.v_gt.tolist() == [1.0, 0.0]
        assert batch.a_gt.tolist() == [1.0, 0.0]
        assert batch.va.tolist() == [[0.5, 0.5], [-0.5, -0.5]]

    def test_missing_labels_raise(self):
        bars = [LabeledBar(tokens=[3, 4])]
        with pytest.raises(MissingLabelsError):
            make_batch(bars, tiny_config(lambda_disc=1.0))
        with pytest.raises(MissingLabelsError):
            make_batch(bars, tiny_config(lambda_cont=1.0))


class TestClipGradients:
    def test_large_gradients_scaled_to_max(self):
        grads = {"a": np.array([3.0, 4.0])}  # norm 5
        norm = clip_gradients(grads, 1.0)
        assert norm == pytest.approx(5.0)
        assert np.linalg.norm(grads["a"]) == pytest.approx(1.0)
        assert grads["a"] == pytest.approx([0.6, 0.8])

    def test_small_gradients_untouched(self):
        grads = {"a": np.array([0.3, 0.4])}
        norm = clip_gradients(grads, 1.0)
        assert norm == pytest.approx(0.5)
        assert grads["a"] == pytest.approx([0.3, 0.4])

    def test_global_norm_spans_tensors(self):
        grads = {"a": np.array([3.0]), "b": np.array([4.0])}
        assert clip_gradients(grads, 10.0) == pytest.approx(5.0)


class TestTrain:
    def test_history_shape_and_numbering(self, tiny_corpus):
        cfg = tiny_config(epochs=3)
        params, history = train(tiny_corpus, cfg)
        assert [h["epoch"] for h in history] == [1, 2, 3]
        for record in history:
            assert set(record) == {
                "epoch",
                "recon",
                "kl",
                "reg_disc",
                "reg_cont",
                "total",
            }
            assert all(np.isfinite(v) for v in record.values())
        assert all(isinstance(v, np.ndarray) for v in params.values())

    def test_determinism(self, tiny_corpus):
        cfg = tiny_config(epochs=2, lambda_disc=1.0, lambda_cont=0.5)
        params_a, history_a = train(tiny_corpus, cfg)
        params_b, history_b = train(tiny_corpus, cfg)
        assert history_a == history_b
        for name in params_a:
            assert np.array_equal(params_a[name], params_b[name])

    def test_loss_decreases_on_tiny_corpus(self, tiny_corpus):
        cfg = tiny_config(epochs=8, optimizer="adam", learning_rate=3e-3)
        _, history = train(tiny_corpus, cfg)
        assert history[-1]["total"] < history[0]["total"]

    def test_resume_extends_history(self, tiny_corpus):
        cfg = tiny_config(epochs=2)
        params, history = train(tiny_corpus, cfg)
        resumed_cfg = tiny_config(epochs=2)
        _, full = train(
            tiny_corpus,
            resumed_cfg,
            initial_params=params,
            start_epoch=2,
            history=history,
        )
        assert [h["epoch"] for h in full] == [1, 2, 3, 4]

    def test_adam_and_sgd_paths_both_run(self, tiny_corpus):
        for optimizer in ("sgd", "adam"):
            cfg = tiny_config(epochs=1, optimizer=optimizer)
            _, history = train(tiny_corpus, cfg)
            assert len(history) == 1

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            train([], tiny_config())

    def test_divergence_is_reported(self, tiny_corpus):
        cfg = tiny_config(epochs=5, learning_rate=1e9, grad_clip=0.0)
        with np.errstate(all="ignore"), pytest.raises(DivergedLossError):
            train(tiny_corpus, cfg)

    def test_epoch_callback(self, tiny_corpus):
        seen = []
        cfg = tiny_config(epochs=2)
        train(tiny_corpus, cfg, on_epoch=seen.append)
        assert [r["epoch"] for r in seen] == [1, 2]


class TestHistoryCsv:
    def test_round_trip_columns(self):
        history = [
            {"epoch": 1, "recon": 2.0, "kl": 0.5, "reg_disc": 1.0, "reg_cont": 0.2, "total": 3.0},
            {"epoch": 2, "recon": 1.5, "kl": 0.4, "reg_disc": 0.8, "reg_cont": 0.1, "total": 2.4},
        ]
        text = history_to_csv(history)
        lines = text.strip().splitlines()
        assert lines[0] == "epoch,recon,kl,reg_disc,reg_cont,total"
        assert len(lines) == 3
        assert lines[1].startswith("1,2.0,0.5")


class TestSyntheticCorpus:
    def test_quadrant_textures(self):
        rng = np.random.default_rng(0)
        for quadrant, (v, a) in QUADRANT_VA.items():
            piece = quadrant_bar(quadrant, rng)
            density = note_density(piece)
            pitches = [n.pitch for n in piece.notes]
            if v > 0:
                assert density >= 8, quadrant
            else:
                assert density <= 3, quadrant
            if a > 0:
                assert min(pitches) >= 76, quadrant
            else:
                assert max(pitches) < 76, quadrant

    def test_bad_quadrant(self):
        with pytest.raises(ValueError):
            quadrant_bar(5, np.random.default_rng(0))

    def test_bars_tokenize_losslessly(self):
        from scenescore.remi import detokenize

        vocab = Vocabulary()
        for piece, _ in make_corpus(16, seed=1):
            again = detokenize(tokenize(piece, vocab.config), vocab.config)
            assert again.notes == piece.notes

    def test_corpus_cycles_quadrants(self):
        corpus = make_corpus(8, seed=0)
        assert [q for _, q in corpus] == [1, 2, 3, 4, 1, 2, 3, 4]

    def test_corpus_to_bars_labels(self):
        bars = corpus_to_bars(make_corpus(4, seed=0), Vocabulary())
        assert [b.quadrant for b in bars] == [1, 2, 3, 4]
        assert bars[0].va == QUADRANT_VA[1]
        assert all(b.tokens[0] == 3 for b in bars)  # leading Bar token

    def test_corpus_dir_round_trip(self, tmp_path):
        corpus = make_corpus(6, seed=2)
        directory = write_corpus_dir(tmp_path / "corpus", corpus)
        labels = read_labels_csv(directory / "labels.csv")
        assert len(labels) == 6
        for index, (piece, quadrant) in enumerate(corpus):
            name = f"bar_{index:03d}.mid"
            assert labels[name]["quadrant"] == quadrant
            assert labels[name]["va"] == QUADRANT_VA[quadrant]
            loaded = read_midi((directory / name).read_bytes())
            assert loaded.notes == piece.notes
