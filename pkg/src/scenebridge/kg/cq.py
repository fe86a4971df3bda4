"""The packaged competency questions answered over a scene knowledge graph."""
from importlib import resources

from ..errors import QueryError
from .query import evaluate, parse_query

COMPETENCY_QUESTIONS = {
    1: "Which objects are needed for a breakfast meal?",
    2: "Which food is likely stored inside which container?",
    3: "Where is a given kind of tool expected to be stored?",
    4: "Which objects can be grasped, directly or by a part?",
    5: "Which objects offer a surface for setting a meal?",
}

_TOOL_PLACEHOLDER = "$TOOL"


def load_cq_pattern(number: int, tool: str | None = None) -> str:
    """Return the pattern text for one packaged question.

    Question 3 is parameterized: pass the class IRI of the tool to look up.
    """
    if number not in COMPETENCY_QUESTIONS:
        raise QueryError(f"no competency question {number}; choose 1..5")
    text = (
        resources.files("scenebridge.kg")
        .joinpath("data")
        .joinpath(f"cq{number}.qp")
        .read_text("utf-8")
    )
    if _TOOL_PLACEHOLDER in text:
        if tool is None:
            raise QueryError(
                f"competency question {number} needs a tool class (e.g. dfl:spoon.n)"
            )
        if "'" in tool or "\n" in tool:
            raise QueryError(f"invalid tool class {tool!r}")
        text = text.replace(_TOOL_PLACEHOLDER, tool)
    elif tool is not None:
        raise QueryError(f"competency question {number} takes no tool argument")
    return text


def run_cq(kg, number: int, tool: str | None = None) -> list:
    """Parse and evaluate one packaged question against a graph."""
    text = load_cq_pattern(number, tool)
    pattern = parse_query(text, origin=f"cq{number}")
    return evaluate(pattern, kg)
