"""JSON schemas for CLI output."""
import json
from importlib import resources


def load(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text(encoding="utf-8"))
