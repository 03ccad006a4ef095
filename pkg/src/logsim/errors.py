"""Exception hierarchy shared across the toolkit.

Data errors cover malformed or insufficient input; pipeline errors cover
failures of discovery, simulation, or optimization stages. The CLI maps
these onto distinct exit codes.
"""


class LogsimError(Exception):
    """Base class for all toolkit errors."""


class DataError(LogsimError):
    """Input data is malformed, inconsistent, or insufficient."""


class SchemaError(DataError):
    """A required CSV column is missing."""


class ParseError(DataError):
    """A row could not be parsed (carries the offending line number)."""


class ValidationError(DataError):
    """Parsed data violates a type invariant."""


class InsufficientDataError(DataError):
    """Operation needs more data than the input provides."""


class InvalidArgumentError(LogsimError, ValueError):
    """A caller-supplied argument is out of range or ill-typed."""


class PipelineError(LogsimError):
    """A discovery/simulation/optimization stage failed."""


class EmptyModelError(PipelineError):
    """Discovery filtered away every activity."""


class NonConformantLogError(PipelineError):
    """Conformance handling left no usable traces."""


class AssemblyError(PipelineError):
    """Simulation-scenario assembly found dangling references."""


class SimulationError(PipelineError):
    """Too many cases aborted during simulation."""


class OptimizationError(PipelineError):
    """Every search trial failed; carries per-trial diagnostics."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = tuple(failures)
