"""
Scenario file loading and the shipped scenario corpus.
"""
import logging
import typing as t
from pathlib import Path

from pydantic import ValidationError

from genkahler.config import CORPUS_DIR
from genkahler.core.errors import UsageError
from genkahler.core.models import Scenario

logger = logging.getLogger(__name__)


class Corpus:
    """Directory of scenario JSON files addressed by name."""

    def __init__(self, root: t.Union[str, Path] = CORPUS_DIR):
        """Initialize the corpus.

        Args:
            root: Directory holding ``<name>.json`` scenario files
        """
        self.root = Path(root)

    def names(self) -> t.List[str]:
        """Sorted scenario names."""
        return sorted(p.stem for p in self.root.glob("*.json"))

    def path(self, name: str) -> Path:
        path = self.root / f"{name}.json"
        if not path.exists():
            raise UsageError(f"no scenario named {name!r} in {self.root}")
        return path

    def load(self, name: str) -> Scenario:
        return load_scenario(self.path(name))


def load_scenario(path: t.Union[str, Path]) -> Scenario:
    """Read and validate a scenario file.

    Raises:
        UsageError: If the file is missing or does not match the schema
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read scenario {path}: {e}") from e
    try:
        scenario = Scenario.model_validate_json(text)
    except ValidationError as e:
        raise UsageError(f"invalid scenario {path}: {e}") from e
    logger.info(f"Loaded scenario {scenario.name} with {len(scenario.tasks)} tasks")
    return scenario


def resolve_scenario(ref: str, corpus: t.Optional[Corpus] = None) -> Scenario:
    """Load a scenario from a file path, or from the corpus when ``ref`` is a name."""
    corpus = corpus or Corpus()
    if Path(ref).suffix == ".json" or Path(ref).exists():
        return load_scenario(ref)
    return corpus.load(ref)
