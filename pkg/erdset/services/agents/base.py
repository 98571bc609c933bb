"""Base agent class for the assembly pipeline."""

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

from erdset.errors import DomainError

logger = logging.getLogger(__name__)


class BaseAgent(ABC):
    """
    One step of the assembly.

    Subclasses implement execute(); callers go through run(), which checks the
    required input keys and logs each step with its wall time.
    """

    required_inputs: Tuple[str, ...] = ()

    def __init__(self, name: str, description: str):
        """
        Initialize base agent.

        Args:
            name: Human-readable agent name
            description: Description of agent's purpose
        """
        self.name = name
        self.description = description

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Check inputs, execute and log the step.

        Raises:
            DomainError: a required input key is missing
        """
        missing = [key for key in self.required_inputs if key not in input_data]
        if missing:
            raise DomainError(f"{self.name} is missing inputs: {', '.join(missing)}")

        logger.debug(f"{self.name}: start with {', '.join(sorted(input_data))}")
        start = time.perf_counter()
        output = self.execute(input_data)
        elapsed_ms = (time.perf_counter() - start) * 1000
        logger.info(f"{self.name}: done in {elapsed_ms:.1f} ms -> {', '.join(sorted(output))}")
        return output

    @abstractmethod
    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Execute the agent's task.

        Args:
            input_data: Input parameters for the agent

        Returns:
            Output data from the agent
        """

    def __repr__(self):
        return f"{self.__class__.__name__}(name='{self.name}')"
