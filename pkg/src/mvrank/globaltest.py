import importlib
import importlib.util
import inspect
import pkgutil
from pathlib import Path
from typing import Any

from mvrank.core import TestOutcome, TwoSampleData
from mvrank.errors import InvalidMethodError, ParameterError, SchemaError
from mvrank.methods.base import BaseMethod


def _load_methods() -> dict[str, type[BaseMethod]]:
    registry: dict[str, type[BaseMethod]] = {}
    methods_path = Path(__file__).parent / "methods"
    for _, module_name, _ in pkgutil.iter_modules([str(methods_path)]):
        if module_name == "base" or module_name.startswith("_"):
            continue
        module = importlib.import_module(f"mvrank.methods.{module_name}")
        for _, cls in inspect.getmembers(module, inspect.isclass):
            if issubclass(cls, BaseMethod) and cls is not BaseMethod and not inspect.isabstract(cls):
                registry[cls().get_name().lower()] = cls
    return registry


_METHODS: dict[str, type[BaseMethod]] = _load_methods()


class GlobalTest:
    """
    A single entry point to every registered two-sample global test.

    Methods are discovered from the `methods/` package: adding one requires
    only a new module there with a class that inherits from BaseMethod.
    """

    def __init__(self, method: str, alpha: float = 0.05, **options: Any):
        method_key = method.lower()
        if method_key not in _METHODS:
            raise InvalidMethodError(f"'{method}' is not a valid method. Available: {list(_METHODS.keys())}")
        if not 0.0 < alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
        self.method_name = method_key
        self.alpha = alpha
        self._method: BaseMethod = _METHODS[method_key](alpha, **options)

    def handles_survival(self) -> bool:
        return self._method.handles_survival()

    @staticmethod
    def get_methods() -> list[str]:
        """Returns the names of all registered methods."""
        return list(_METHODS.keys())

    @staticmethod
    def add_method(path: str | Path) -> list[str]:
        """
        Loads BaseMethod subclasses from an external Python file and registers them.

        The methods then become available to every GlobalTest by the names their
        get_name() returns. The CLI exposes this as ``--plugin`` and experiment
        specs as ``plugins``.

        Args:
            path: Absolute or relative path to the Python file.

        Returns:
            list[str]: The registered method names.
        """
        path = Path(path)
        spec = importlib.util.spec_from_file_location(f"_mvrank_plugin_{path.stem}", path)
        if spec is None or spec.loader is None:
            raise InvalidMethodError(f"Cannot load module from '{path}'")
        module = importlib.util.module_from_spec(spec)
        try:
            spec.loader.exec_module(module)
        except (OSError, SyntaxError, ImportError) as e:
            raise InvalidMethodError(f"Cannot load module from '{path}': {e}") from e
        names = []
        for _, cls in inspect.getmembers(module, inspect.isclass):
            if issubclass(cls, BaseMethod) and cls is not BaseMethod and not inspect.isabstract(cls):
                name = cls().get_name().lower()
                _METHODS[name] = cls
                names.append(name)
        if not names:
            raise InvalidMethodError(f"No BaseMethod subclass found in '{path}'")
        return names

    def run(self, data: TwoSampleData, *, seed: int = 0) -> TestOutcome:
        """
        Tests H0: both arms of ``data`` share one distribution.

        Args:
            data: The two-arm dataset.
            seed: Seed for the method's randomness (uniform point sets,
                permutations).

        Returns:
            TestOutcome: Statistic, threshold and decision.

        Raises:
            SchemaError: ``data`` has a time-to-event endpoint and the method
                does not handle censoring.
        """
        if data.has_survival and not self.handles_survival():
            raise SchemaError(
                f"Method '{self.method_name}' cannot handle the time-to-event endpoint '{data.names[0]}'",
                column=data.names[0],
            )
        return self._method.run(data, seed=seed)
