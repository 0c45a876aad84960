from abc import ABC, abstractmethod
from typing import Any

from mvrank.core import TestOutcome, TwoSampleData


class BaseMethod(ABC):
    def __init__(self, alpha: float = 0.05, **options: Any):
        self.alpha = alpha
        self.options = options

    @abstractmethod
    def get_name(self) -> str: ...

    @abstractmethod
    def handles_survival(self) -> bool: ...

    @abstractmethod
    def run(self, data: TwoSampleData, *, seed: int = 0) -> TestOutcome: ...
