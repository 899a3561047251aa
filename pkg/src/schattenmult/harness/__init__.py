"""Seeded instance generation and verification campaigns."""

from .campaign import CSV_COLUMNS, CampaignConfig, CampaignReport, run_campaign
from .generate import KINDS, Dims, generate_instance
from .suites import SUITES, SuiteResult, suite_names

__all__ = [
    "CSV_COLUMNS",
    "CampaignConfig",
    "CampaignReport",
    "Dims",
    "KINDS",
    "SUITES",
    "SuiteResult",
    "generate_instance",
    "run_campaign",
    "suite_names",
]
