"""sskr-forge: a matrix-structured model knowledgebase with a statement planner,
ODE code generation, and machine-learning-guided calibration."""

__version__ = "0.1.0"
