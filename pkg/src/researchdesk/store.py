"""Durable, versioned asset storage with provenance, scoped per user/project.

One JSON file per asset (canonical wire form), written atomically via a temp
file + rename; a process restart therefore sees exactly what ``put`` returned.
Updates are new versions chained through ``supersedes``, never in-place edits.
"""

from __future__ import annotations

import os
import re
import threading
import uuid
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import quote

from .errors import (
    StorageFailureError,
    UnknownAssetError,
    UnknownProjectError,
    ValidationFailedError,
)
from .model import (
    Asset,
    FrozenWireModel,
    UtcTimestamp,
    canonical_json,
    utc_now,
    validate_asset,
)

_SLUG_STRIP = re.compile(r"[^a-z0-9]+")


def slugify(name: str) -> str:
    slug = _SLUG_STRIP.sub("-", name.lower()).strip("-")
    return slug or "asset"


def asset_filename(asset: Asset) -> str:
    """Export dump name: <role>-v<version>-<slug(name)>.<ext>"""
    ext = "txt" if asset.kind == "text" else "json"
    return f"{asset.role}-v{asset.version}-{slugify(asset.name)}.{ext}"


class Project(FrozenWireModel):
    id: str
    user_id: str
    name: str
    created_at: UtcTimestamp


class ExportSelection(FrozenWireModel):
    """Immutable snapshot of assets (with their provenance) chosen for export."""

    assets: tuple[Asset, ...] = ()


class AssetStore:
    def __init__(self, root: Path | str, clock: Callable = utc_now):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._clock = clock
        self._locks: dict[Path, threading.RLock] = {}
        self._locks_guard = threading.Lock()

    # -- layout ------------------------------------------------------------

    def _project_dir(self, user_id: str, project_id: str) -> Path:
        return self.root / quote(user_id, safe="") / quote(project_id, safe="")

    def _lock(self, project_dir: Path) -> threading.RLock:
        with self._locks_guard:
            return self._locks.setdefault(project_dir, threading.RLock())

    # -- projects ----------------------------------------------------------

    def ensure_project(
        self, user_id: str, project_id: str = "default", name: str = "Default project"
    ) -> Project:
        """Fetch the project, creating it on first access (the per-user default)."""
        directory = self._project_dir(user_id, project_id)
        meta = directory / "project.json"
        with self._lock(directory):
            if meta.exists():
                return Project.model_validate_json(meta.read_text("utf-8"))
            project = Project(
                id=project_id, user_id=user_id, name=name, created_at=self._clock()
            )
            (directory / "assets").mkdir(parents=True, exist_ok=True)
            _atomic_write(meta, canonical_json(project))
            return project

    def get_project(self, user_id: str, project_id: str) -> Project:
        meta = self._project_dir(user_id, project_id) / "project.json"
        if not meta.exists():
            raise UnknownProjectError(f"no project {project_id!r} for user {user_id!r}")
        return Project.model_validate_json(meta.read_text("utf-8"))

    # -- assets ------------------------------------------------------------

    def put(self, user_id: str, project_id: str, asset: Asset) -> Asset:
        """Durably store the asset, assigning id and version along its chain."""
        directory = self._project_dir(user_id, project_id)
        with self._lock(directory):
            self.ensure_project(user_id, project_id)
            assets_dir = directory / "assets"
            if asset.supersedes is not None:
                target_path = assets_dir / f"{asset.supersedes}.json"
                if not target_path.exists():
                    raise ValidationFailedError(
                        [f"supersedes target {asset.supersedes!r} does not exist"]
                    )
                target = Asset.model_validate_json(target_path.read_text("utf-8"))
                if (target.role, target.name) != (asset.role, asset.name):
                    raise ValidationFailedError(
                        ["supersedes target must share role and name"]
                    )
                if any(a.supersedes == target.id for a in self._iter_assets(assets_dir)):
                    raise ValidationFailedError(
                        [f"asset {target.id!r} is already superseded"]
                    )
                version = target.version + 1
            else:
                version = 1
            stored = asset.model_copy(
                update={"id": asset.id or f"a-{uuid.uuid4().hex[:12]}", "version": version}
            )
            violations = validate_asset(stored)
            if violations:
                raise ValidationFailedError(violations)
            path = assets_dir / f"{stored.id}.json"
            if path.exists():
                raise ValidationFailedError([f"asset id {stored.id!r} already exists"])
            try:
                _atomic_write(path, canonical_json(stored))
            except OSError as exc:
                raise StorageFailureError(str(exc)) from exc
            return stored

    def get(self, user_id: str, project_id: str, asset_id: str) -> Asset:
        path = self._project_dir(user_id, project_id) / "assets" / f"{asset_id}.json"
        if not path.exists():
            raise UnknownAssetError(f"no asset {asset_id!r}")
        return Asset.model_validate_json(path.read_text("utf-8"))

    def list(
        self,
        user_id: str,
        project_id: str,
        role: Optional[str] = None,
        newest_only: bool = False,
    ) -> list[Asset]:
        """Assets ordered by (role, version desc, name); newestOnly keeps chain heads."""
        assets_dir = self._project_dir(user_id, project_id) / "assets"
        assets = list(self._iter_assets(assets_dir))
        if role is not None:
            assets = [a for a in assets if a.role == role]
        if newest_only:
            superseded = {a.supersedes for a in assets if a.supersedes}
            assets = [a for a in assets if a.id not in superseded]
        assets.sort(key=lambda a: (a.role, -a.version, a.name, a.id))
        return assets

    def newest(self, user_id: str, project_id: str, role: str, name: Optional[str] = None):
        """Head asset of the newest chain for a role (optionally a given name)."""
        for asset in self.list(user_id, project_id, role=role, newest_only=True):
            if name is None or asset.name == name:
                return asset
        return None

    def select_for_export(
        self, user_id: str, project_id: str, asset_ids: list[str]
    ) -> ExportSelection:
        self.get_project(user_id, project_id)
        return ExportSelection(
            assets=tuple(self.get(user_id, project_id, a) for a in asset_ids)
        )

    @staticmethod
    def _iter_assets(assets_dir: Path):
        if not assets_dir.exists():
            return
        for path in sorted(assets_dir.glob("*.json")):
            yield Asset.model_validate_json(path.read_text("utf-8"))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    temp = path.with_suffix(f".tmp-{uuid.uuid4().hex[:6]}")
    temp.write_text(text, "utf-8")
    os.replace(temp, path)
