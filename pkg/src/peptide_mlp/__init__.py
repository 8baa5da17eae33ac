"""Peptide-biomarker classification: balancing, GA feature selection, SCG-trained MLP and evaluation."""

__version__ = "0.1.0"

from .data import (  # noqa: E402
    CASE,
    CONTROL,
    FeatureSubset,
    FoldPlan,
    LabeledDataset,
    Standardizer,
    apply_standardizer,
    fit_standardizer,
    load_csv,
    save_csv,
    stratified_kfold,
    stratified_split,
)
