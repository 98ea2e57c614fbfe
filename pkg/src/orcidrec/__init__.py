"""orcidrec: reconcile, repair, and measure ORCID-to-author assertions.

The package is organised as a pipeline: `ingest` parses the normalized
NDJSON dumps, `linkage` joins the three sources at the author level,
`quality` detects and repairs shuffled assertions, `metrics` computes
the adoption/engagement indicators, `synthworld` generates seeded
ground-truth corpora for evaluation, and `cli` orchestrates it all.
"""

from .ingest import validate_orcid_checksum
from .quality import levenshtein_ratio

__all__ = ["validate_orcid_checksum", "levenshtein_ratio"]
__version__ = "0.1.0"
