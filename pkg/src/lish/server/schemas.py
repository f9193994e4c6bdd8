"""Pydantic request/response models for the document service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class CommandBatch(BaseModel):
    """A batch of edit commands applied atomically at one expected version."""

    expected_version: int
    commands: list[dict[str, Any]] = Field(min_length=1)


class SnapshotResponse(BaseModel):
    id: str
    version: int
    doc: dict[str, Any]
    layout: list[dict[str, Any]]


class ApplyResponse(BaseModel):
    id: str
    version: int
    diagnostics: list[str]
    doc: dict[str, Any]


class ConflictResponse(BaseModel):
    error: str = "version-conflict"
    current_version: int


class RejectedResponse(BaseModel):
    error: str
    report: dict[str, Any] | None = None
