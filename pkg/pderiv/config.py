"""
Limits profile loading.
Numeric caps and budgets are kept in a JSON profile next to this module.
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional

DEFAULT_PROFILE = Path(__file__).with_name("defaults.json")


def load_limits(profile_path: Optional[str] = None) -> Dict:
    """
    Load a limits profile.

    Args:
        profile_path: Path to a JSON profile (default: the bundled defaults.json)

    Returns:
        Dictionary of sections, e.g. {"ipd": {"max_elements": 100000}, ...}
    """
    path = Path(profile_path) if profile_path else DEFAULT_PROFILE
    if not path.exists():
        raise FileNotFoundError(f"Limits profile not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@lru_cache(maxsize=1)
def default_limits() -> Dict:
    """Bundled profile, read once per process."""
    return load_limits()


def limit(section: str, key: str, fallback):
    """Look up one value from the bundled profile with an in-code fallback."""
    return default_limits().get(section, {}).get(key, fallback)
