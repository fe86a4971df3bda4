"""Exception hierarchy shared across the package."""


class SceneBridgeError(Exception):
    """Base class for all scenebridge failures."""


class SceneImportError(SceneBridgeError):
    """A source document could not be mapped into the scene model."""


class SceneExportError(SceneBridgeError):
    """The scene model cannot be expressed in the requested target format."""


class PropertyKindError(SceneBridgeError):
    """A property value does not match the kind registered for its name."""


class MeshError(SceneBridgeError):
    """Mesh data is unusable for the requested operation (open, inverted, degenerate)."""


class UsdaSyntaxError(SceneBridgeError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class OntologyError(SceneBridgeError):
    """Ontology fixture text could not be parsed."""


class QueryError(SceneBridgeError):
    """Query pattern is malformed or uses an unknown predicate."""


class RetriableClientError(SceneBridgeError):
    """Transient failure talking to an external service; the request may be retried."""
