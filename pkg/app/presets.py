import json
import logging
import re
from functools import lru_cache
from typing import Dict, List, Tuple

from app.config import settings
from app.errors import PresetNotFound

logger = logging.getLogger(__name__)

_PRESET_RE = re.compile(r"^\s*([a-z_]+)\s*\(\s*([-\d,\s]*)\)\s*$")

PRESET_KINDS = ("ea", "real_example", "padic_example")


def parse_preset(text: str) -> Tuple[str, List[int]]:
    """
    "ea(2)" -> ("ea", [2]); "real_example" -> ("real_example", [])
    """
    text = text.strip()
    match = _PRESET_RE.match(text)
    if match:
        name, args = match.group(1), match.group(2)
        values = [int(a) for a in args.split(",") if a.strip()]
    else:
        name, values = text, []
    if name not in PRESET_KINDS:
        raise PresetNotFound(f"неизвестный пресет: {text}", known=", ".join(PRESET_KINDS))
    return name, values


@lru_cache(maxsize=None)
def _load(path: str) -> Dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_presets() -> Dict:
    return _load(str(settings.presets_path))


def pinned_ea_seed(a: int):
    """
    Закреплённые начальные точки x_1, x_2 для E_a или None
    """
    entry = load_presets().get("ea", {}).get(str(a))
    if entry is None:
        return None
    return entry["x1"], entry["x2"]
