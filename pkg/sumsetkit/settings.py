import logging
import os

from sumsetkit.errors import ConfigError

LOGGER = logging.getLogger(__name__)

DEFAULT_COUNTING_PRIME = (1 << 61) - 1


def load_dotenv(path: str = ".env") -> dict[str, str]:
    if not os.path.isfile(path):
        return {}
    with open(path) as file:
        lines = file.read().splitlines()

    dotenv_vars = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue

        key, value = line.split("=", maxsplit=1)
        dotenv_vars[key.strip()] = value.strip().strip('"')

    return dotenv_vars


class Settings:
    """Runtime knobs read from ``SUMSETKIT_<KEY>`` variables.

    The process environment takes precedence over a ``.env`` file in the
    working directory. Values are coerced to the type of their default.
    """

    def __init__(self):
        self.group = "SUMSETKIT"
        self.data = {
            "threads": 0,
            "counting_prime": DEFAULT_COUNTING_PRIME,
        }
        self.load_all()

    def variable(self, key: str) -> str:
        return f"{self.group}_{key.upper()}"

    def load(self, key):
        name = self.variable(key)
        value = os.environ.get(name)
        if value is None:
            value = load_dotenv().get(name)
        if not value:
            return
        try:
            self.data[key] = type(self.data[key])(value)
        except ValueError as e:
            raise ConfigError(f"{name}={value!r} is not a valid {key}") from e

    def save(self, key, value):
        os.environ[self.variable(key)] = str(value)

        self.load_all()

    def load_all(self):
        for k in self.data:
            self.load(k)

    def thread_count(self) -> int:
        threads = self.data["threads"]
        if threads < 0:
            raise ConfigError(f"{self.variable('threads')} must be >= 0")
        if threads == 0:
            threads = min(4, os.cpu_count() or 1)
        return threads
