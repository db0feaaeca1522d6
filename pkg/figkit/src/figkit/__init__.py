"""figkit: renders publication-style figures from elaasim result bundles.

The tool consumes only the delimited CSV/JSON files written by the
``elaasim`` CLI; it never imports the simulator.
"""

__version__ = "0.1.0"
