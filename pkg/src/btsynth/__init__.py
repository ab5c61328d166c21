"""btsynth: synthesize bpftrace programs from natural-language requests,
annotate them with kernel-contract assumptions, and check the annotations
by symbolic execution before anything ships to the user."""

__version__ = "0.1.0"
