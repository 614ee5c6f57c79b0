"""Runtime for guarded interaction trees with context-dependent effect reifiers,
modeled preemptive concurrency, and a five-language differential-testing
workbench (call/cc, exceptions, shift/reset, store embedding, concurrent
affine)."""

__version__ = "0.1.0"
