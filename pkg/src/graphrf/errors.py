"""Exception types shared across the package.

Most invalid-input conditions map onto ValueError/IndexError subclasses so
callers can catch either the specific class or the builtin.
"""


class GraphError(Exception):
    """Base class for all package-specific errors."""


class NodeIndexError(GraphError, IndexError):
    """A node id is outside 0..node_count-1."""


class SelfLoopError(GraphError, ValueError):
    """An edge joins a node to itself."""


class AttributeShapeError(GraphError, ValueError):
    """Attribute arrays are inconsistent with the graph."""


class DuplicateNodeError(GraphError, ValueError):
    """A node sequence contains repeats where it must not."""


class TooLargeError(GraphError, ValueError):
    """Input exceeds a size bound (factorial or exponential search)."""


class ShapeMismatchError(GraphError, ValueError):
    """Array arguments disagree in shape."""


class RootMissingError(GraphError, ValueError):
    """The root vertex is not part of the neighborhood being normalized."""


class GridTooSmallError(GraphError, ValueError):
    """Grid dimensions cannot hold a single receptive field."""


class MixedSizesError(GraphError, ValueError):
    """A collection that must be uniform in node count is not."""


class EmptyCollectionError(GraphError, ValueError):
    """An operation needs at least one graph."""


class ExhaustedError(GraphError, RuntimeError):
    """Sampling could not produce enough valid items."""


class BadParamsError(GraphError, ValueError):
    """Generator parameters are out of range."""


class TooSmallError(GraphError, ValueError):
    """Generator dimensions are below the supported minimum."""


class DatasetError(GraphError):
    """Base class for dataset ingestion failures."""


class MissingFileError(DatasetError, FileNotFoundError):
    """A required dataset file does not exist."""


class MalformedLineError(DatasetError, ValueError):
    """A dataset file line failed to parse.

    Carries the path and 1-based line number for error messages.
    """

    def __init__(self, path, line_number, detail):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {detail}")


class InconsistentIndicatorError(DatasetError, ValueError):
    """graph_indicator contents disagree with the other dataset files."""


class HeterogeneousBatchesError(GraphError, ValueError):
    """Tensor batches written to one file must share w, k, a_v, a_e."""


class CorruptHeaderError(GraphError, ValueError):
    """A tensor or checkpoint file header failed validation."""


class TruncatedPayloadError(GraphError, ValueError):
    """A binary payload is shorter than its header promises."""


class MissingCacheError(GraphError, RuntimeError):
    """backward() called without the activation cache from forward()."""


class DegenerateLabelsError(GraphError, ValueError):
    """Training requires at least two distinct class labels."""


class TooFewSamplesError(GraphError, ValueError):
    """Not enough samples to build the requested folds."""
