"""Agents of the finite-stage assembly pipeline."""

from .orchestrator import AgentOrchestrator, TaskType, assemble_avoiding_set, get_orchestrator
from .extraction_agent import ExtractionAgent
from .cover_agent import CoverAgent
from .verification_agent import VerificationAgent

__all__ = [
    "AgentOrchestrator",
    "TaskType",
    "assemble_avoiding_set",
    "get_orchestrator",
    "ExtractionAgent",
    "CoverAgent",
    "VerificationAgent",
]
