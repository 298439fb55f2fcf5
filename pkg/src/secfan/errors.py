"""Error taxonomy shared by the CLI: validation problems vs broken internal invariants."""


class ValidationError(ValueError):
    """Bad user input (exit code 2 at the CLI)."""


class InternalInvariantError(RuntimeError):
    """A mathematical invariant the library guarantees failed; a bug, never an input problem
    (exit code 3 at the CLI)."""
