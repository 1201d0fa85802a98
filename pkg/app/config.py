import json
import os
import sys
from pathlib import Path
from typing import Optional

from app.errors import PreconditionViolated
from app.schemas.config import RunConfigCreate, RunConfigRead

# записи матриц Фибоначчи у предела INDEX_CAP длиннее 4300 цифр
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

ARTIFACT_VERSION = "0.3.0"

DEFAULT_BITS = int(os.getenv("DIOPH_DEFAULT_BITS", "256"))
INDEX_CAP = int(os.getenv("DIOPH_INDEX_CAP", "28"))
LOG_LEVEL = os.getenv("DIOPH_LOG_LEVEL", "WARNING")
THREADS = int(os.getenv("DIOPH_THREADS", "1"))
SEED = int(os.getenv("DIOPH_SEED", "20240601"))
PRESETS_PATH = os.getenv("DIOPH_PRESETS", str(Path(__file__).with_name("presets.json")))

# запас прочности для эмпирически подобранных констант
SAFETY_FACTOR = 10


class Settings:
    def __init__(self):
        self.default_bits = DEFAULT_BITS
        self.index_cap = INDEX_CAP
        self.log_level = LOG_LEVEL
        self.threads = THREADS
        self.seed = SEED
        self.presets_path = PRESETS_PATH
        self.safety_factor = SAFETY_FACTOR

    def reload(self):
        """
        Перечитывает переменные окружения (после load_dotenv)
        """
        self.default_bits = int(os.getenv("DIOPH_DEFAULT_BITS", str(DEFAULT_BITS)))
        self.index_cap = int(os.getenv("DIOPH_INDEX_CAP", str(INDEX_CAP)))
        self.log_level = os.getenv("DIOPH_LOG_LEVEL", LOG_LEVEL)
        self.threads = int(os.getenv("DIOPH_THREADS", str(THREADS)))
        self.seed = int(os.getenv("DIOPH_SEED", str(SEED)))
        self.presets_path = os.getenv("DIOPH_PRESETS", PRESETS_PATH)
        return self

    def run_config(self, **overrides) -> RunConfigRead:
        base = {
            "index_cap": self.index_cap,
            "bits": self.default_bits,
            "seed": self.seed,
            "threads": self.threads,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfigRead(**base)

    def apply(self, config: RunConfigRead):
        self.default_bits = config.bits
        self.index_cap = config.index_cap
        self.threads = config.threads
        self.seed = config.seed
        return self


settings = Settings()


def load_run_config(path: Optional[str], **overrides) -> RunConfigRead:
    """
    RunConfig из JSON-файла; флаги командной строки перекрывают значения файла
    """
    values = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                values = RunConfigCreate(**json.load(fh)).model_dump(exclude_none=True)
        except (OSError, ValueError) as exc:
            raise PreconditionViolated(f"не удалось прочитать конфигурацию {path}: {exc}")
        if "log_level" in values:
            settings.log_level = values.pop("log_level")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return settings.run_config(**values)
