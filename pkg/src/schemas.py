from pydantic import BaseModel
from typing import Any, Dict, List

# --- Pydantic models for structured, predictable command output ---

class AppInfo(BaseModel):
    """Defines the structure of the `info` command output."""
    service: str
    version: str
    environment: str
    commands: List[str]
    settings: Dict[str, Any]
