"""scenescore: screenplay sentiment analysis and steered symbolic music.

Two halves joined by the valence-arousal circumplex: the analysis side
parses Hollywood-format scripts and scores each scene's sentiment against
a VAD lexicon; the music side trains a small bar-level sequence VAE whose
latent space is steered by those scores to generate matching piano MIDI.
"""

__version__ = "0.1.0"
