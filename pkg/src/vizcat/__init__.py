"""vizcat: a curated catalog of HPC visualization examples.

Tag-based search over folder-per-example repositories, plus a packager
that turns any entry into a single-script containerized run bundle for
local, MPI, or Slurm execution.
"""

__version__ = "0.1.0"
