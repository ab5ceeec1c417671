"""
Pointer Shift CLI

시나리오 설정, 스캔/격자 출력, 불변식 검증
"""

from .config import PRESETS, ScenarioConfig, load_config
from .main import main

__all__ = ["PRESETS", "ScenarioConfig", "load_config", "main"]
