"""crowdverdict: predicting crowdsourced verdicts on toxic behavior in team games.

Pipeline pieces: case data model and JSONL corpus format (``domain``),
lexicon-based valence scoring (``valence``), 452-feature extraction
(``features``), from-scratch random forests with a compiled split kernel
(``forest``), ROC/AUC experiment harness (``eval``), a calibrated synthetic
corpus generator (``synth``), operational impact calculators (``impact``),
and a CLI (``cli``).
"""

__version__ = "0.1.0"
