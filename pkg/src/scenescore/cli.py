"""Command-line entry points.

Thin wrappers over the library: analyze a script against a lexicon, train
or finetune the bar VAE on a corpus directory, compute attribute vectors,
generate steered MIDI, host the HTTP service, or write a synthetic demo
corpus.  Exit code 0 on success, 1 with a message on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import latent as latent_ops
from . import synthetic
from .midi import MidiError, TimeSignatureError, read_midi, write_midi
from .remi import EmptyPieceError, VocabConfig, Vocabulary, chunk_bars, tokenize
from .sentiment import analyze_script_text, load_lexicon
from .store import ProjectStore
from .vae import (
    Checkpoint,
    LabeledBar,
    VaeConfig,
    atomic_write_bytes,
    checkpoint_hash,
    history_to_csv,
    load_checkpoint,
    save_checkpoint,
    train,
)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_config_overrides(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _corpus_bars(corpus_dir: Path, vocab: Vocabulary) -> list[LabeledBar]:
    """Tokenize every .mid in a corpus directory into single-bar units.

    A labels.csv sidecar (file, quadrant, V, A) attaches labels; every bar
    chunk of a file inherits that file's labels.
    """
    labels = {}
    labels_path = corpus_dir / "labels.csv"
    if labels_path.is_file():
        labels = synthetic.read_labels_csv(labels_path)

    bars: list[LabeledBar] = []
    for path in sorted(corpus_dir.glob("*.mid")):
        piece = read_midi(path.read_bytes())
        try:
            tokens = tokenize(piece, vocab.config)
        except EmptyPieceError:
            continue
        label = labels.get(path.name, {})
        for chunk in chunk_bars(tokens):
            bars.append(
                LabeledBar(
                    tokens=vocab.encode(chunk),
                    quadrant=label.get("quadrant"),
                    va=label.get("va"),
                )
            )
    return bars


def cmd_analyze(args: argparse.Namespace) -> int:
    lexicon_path = Path(args.lexicon)
    if not lexicon_path.is_file():
        return _fail(f"lexicon not found: {lexicon_path}")
    script_path = Path(args.script)
    if not script_path.is_file():
        return _fail(f"script not found: {script_path}")

    from .screenplay import DEFAULT_SENTENCE_KINDS, ElementKind

    kinds = {
        "both": DEFAULT_SENTENCE_KINDS,
        "dialogue": (ElementKind.DIALOGUE,),
        "action": (ElementKind.ACTION,),
    }[args.sources]
    lexicon = load_lexicon(lexicon_path)
    records = analyze_script_text(
        script_path.read_text(encoding="utf-8"), lexicon, sentence_kinds=kinds
    )
    payload = json.dumps({"scenes": records}, indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return 0


def _build_vae_config(vocab: Vocabulary, overrides: dict, args) -> VaeConfig:
    settings = {"vocab_size": vocab.size}
    settings.update(overrides.get("vae", {}))
    if args.epochs is not None:
        settings["epochs"] = args.epochs
    if args.seed is not None:
        settings["seed"] = args.seed
    return VaeConfig(**settings)


def cmd_train(args: argparse.Namespace) -> int:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        return _fail(f"corpus directory not found: {corpus_dir}")
    overrides = _load_config_overrides(args.config)
    vocab = Vocabulary(VocabConfig(**overrides.get("vocab", {})))

    initial = None
    start_epoch = 0
    history = None
    if args.resume:
        checkpoint = load_checkpoint(args.resume)
        vocab = Vocabulary(checkpoint.vocab)
        config = checkpoint.config
        for key, value in overrides.get("vae", {}).items():
            setattr(config, key, value)
        if args.epochs is not None:
            config.epochs = args.epochs
        initial = checkpoint.params
        start_epoch = checkpoint.epoch
        history = checkpoint.history
    else:
        config = _build_vae_config(vocab, overrides, args)

    try:
        bars = _corpus_bars(corpus_dir, vocab)
    except (MidiError, TimeSignatureError) as error:
        return _fail(str(error))

    from .vae import DivergedLossError, EmptyCorpusError, MissingLabelsError

    try:
        params, history = train(
            bars,
            config,
            initial_params=initial,
            start_epoch=start_epoch,
            history=history,
            on_epoch=lambda rec: print(
                f"epoch {rec['epoch']:3d}  total {rec['total']:.4f}  "
                f"recon {rec['recon']:.4f}  kl {rec['kl']:.4f}",
                file=sys.stderr,
            ),
        )
    except (EmptyCorpusError, MissingLabelsError, DivergedLossError) as error:
        return _fail(str(error))

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(
        out_path,
        Checkpoint(
            params=params,
            config=config,
            vocab=vocab.config,
            epoch=history[-1]["epoch"],
            history=history,
        ),
    )
    if args.history:
        Path(args.history).write_text(history_to_csv(history))
    print(f"wrote {out_path} ({checkpoint_hash(out_path)})")
    return 0


def cmd_attrs(args: argparse.Namespace) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    vocab = Vocabulary(checkpoint.vocab)
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        return _fail(f"corpus directory not found: {corpus_dir}")
    bars = _corpus_bars(corpus_dir, vocab)
    labeled = [bar for bar in bars if bar.quadrant is not None]
    if not labeled:
        return _fail("corpus has no quadrant labels (labels.csv missing?)")
    try:
        attrs = latent_ops.compute_attribute_vectors(
            checkpoint.params, checkpoint.config, labeled, mode=args.mode
        )
    except latent_ops.EmptyGroupError as error:
        return _fail(str(error))
    atomic_write_bytes(Path(args.out), attrs.to_json().encode())
    print(f"wrote {args.out}")
    return 0


def _bundle_from_args(args) -> latent_ops.ModelBundle | ProjectStore | None:
    if args.store:
        store = ProjectStore(args.store)
        bundle = store.load_model()
        if bundle is None:
            return None
        return bundle
    checkpoint = load_checkpoint(args.checkpoint)
    attrs = None
    if args.attrs:
        attrs = latent_ops.AttributeVectors.from_json(Path(args.attrs).read_text())
    return latent_ops.ModelBundle(
        params=checkpoint.params,
        config=checkpoint.config,
        vocab=Vocabulary(checkpoint.vocab),
        attrs=attrs,
        model_hash=checkpoint_hash(args.checkpoint),
    )


def cmd_generate(args: argparse.Namespace) -> int:
    if not args.store and not args.checkpoint:
        return _fail("give either --store or --checkpoint")
    bundle = _bundle_from_args(args)
    if bundle is None:
        return _fail("model not loaded: no checkpoint in store")

    inspiration = None
    if args.inspiration:
        data = Path(args.inspiration).read_bytes()
        inspiration = latent_ops.encode_inspiration(
            data, bundle.params, bundle.config, bundle.vocab
        )
        if args.base == "random":
            args.base = "inspiration"

    kwargs = dict(
        mode=args.mode,
        n_bars=args.bars,
        alpha=args.alpha,
        base=args.base,
        inspiration=inspiration,
        seed=args.seed,
    )
    if args.mode == "trajectory":
        kwargs["va_start"] = tuple(args.va_start or (args.valence, args.arousal))
        kwargs["va_end"] = tuple(args.va_end or (args.valence, args.arousal))
    else:
        kwargs["valence"] = args.valence
        kwargs["arousal"] = args.arousal

    try:
        piece = latent_ops.generate_piece(bundle, **kwargs)
    except (ValueError, latent_ops.ModelNotLoadedError) as error:
        return _fail(str(error))
    data = write_midi(piece)

    if args.out:
        atomic_write_bytes(Path(args.out), data)
        print(args.out)
    elif args.store:
        store = ProjectStore(args.store)
        request_doc = {
            "V": args.valence,
            "A": args.arousal,
            "mode": args.mode,
            "n_bars": args.bars,
            "alpha": args.alpha,
            "base": args.base,
            "seed": args.seed,
            "va_start": kwargs.get("va_start"),
            "va_end": kwargs.get("va_end"),
        }
        artifact_id = store.save_artifact(
            data, {"request": request_doc, "model_hash": bundle.model_hash}
        )
        print(artifact_id)
    else:
        return _fail("give --out FILE or --store DIR to receive the artifact")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    store = ProjectStore(
        args.store,
        lexicon_path=args.lexicon,
        checkpoint_path=args.checkpoint,
        attrs_path=args.attrs,
    )
    uvicorn.run(create_app(store), host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_demo_corpus(args: argparse.Namespace) -> int:
    corpus = synthetic.make_corpus(n_bars=args.bars, seed=args.seed)
    synthetic.write_corpus_dir(args.directory, corpus)
    print(f"wrote {args.bars} bars to {args.directory}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenescore",
        description="Scene sentiment analysis and sentiment-steered MIDI generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="score a screenplay's scenes against a lexicon")
    p.add_argument("script")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out")
    p.add_argument("--sources", choices=("both", "dialogue", "action"), default="both")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train", help="train or finetune the bar VAE on a corpus dir")
    p.add_argument("corpus")
    p.add_argument("--out", default="checkpoint.json")
    p.add_argument("--history", help="write loss history CSV here")
    p.add_argument("--resume", help="checkpoint to finetune from")
    p.add_argument("--config", help="JSON with {vae: {...}, vocab: {...}} overrides")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("attrs", help="compute attribute vectors from a labeled corpus")
    p.add_argument("checkpoint")
    p.add_argument("corpus")
    p.add_argument("--out", default="attrs.json")
    p.add_argument("--mode", choices=("mean", "diff"), default="mean")
    p.set_defaults(func=cmd_attrs)

    p = sub.add_parser("generate", help="generate a steered MIDI piece")
    p.add_argument("--store", help="project store directory")
    p.add_argument("--checkpoint", help="checkpoint path (if no store)")
    p.add_argument("--attrs", help="attribute vectors path (if no store)")
    p.add_argument("-V", "--valence", type=float, default=0.0)
    p.add_argument("-A", "--arousal", type=float, default=0.0)
    p.add_argument("--mode", choices=("point", "trajectory"), default="point")
    p.add_argument("--va-start", type=float, nargs=2, metavar=("V", "A"))
    p.add_argument("--va-end", type=float, nargs=2, metavar=("V", "A"))
    p.add_argument("--bars", type=int, default=8)
    p.add_argument("--alpha", type=float, default=latent_ops.DEFAULT_AROUSAL_THRESHOLD)
    p.add_argument("--base", choices=("random", "inspiration", "regularized"), default="random")
    p.add_argument("--inspiration", help="MIDI file to steer toward")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the .mid here instead of into the store")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="host the HTTP service over a store")
    p.add_argument("--store", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--checkpoint")
    p.add_argument("--attrs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("demo-corpus", help="write a synthetic labeled corpus")
    p.add_argument("directory")
    p.add_argument("--bars", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as error:
        return _fail(str(error))
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
