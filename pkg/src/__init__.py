"""PRIMEBALL - desk-scale cloud benchmark harness for a simulated news hub."""

__version__ = "1.0.0"
__description__ = (
    "Synthetic news-hub corpus, simulated replicated storage, query and scenario "
    "workload, and metric/pricing calculations for the PRIMEBALL benchmark"
)
