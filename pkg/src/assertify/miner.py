"""Repository mining: assertion counting, maturity filtering, pinned clones.

Candidates come from a user-supplied JSON list of repository URLs. Stars
are fetched from the hosting service's metadata API (cached on disk, with
an offline file override); production assertions are counted on a local
clone with the line-screening rule restricted to non-test files under the
configured source prefix.
"""

from __future__ import annotations

import json
import logging
import os
import re
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlparse

from .corpus import is_test_path

log = logging.getLogger(__name__)

GH_TOKEN_ENV = "ASSERTIFY_GH_TOKEN"
_COMMIT_RE = re.compile(r"^[0-9a-f]{40}$")


@dataclass
class RepoRef:
    host_url: str
    owner: str
    name: str
    stars: int = -1  # -1 = unknown
    pinned_commit: str = ""
    assertion_count: int = -1  # -1 = unknown

    def __post_init__(self):
        if not self.owner or not self.name:
            raise ValueError("owner and name must be non-empty")
        if self.pinned_commit and not _COMMIT_RE.match(self.pinned_commit):
            raise ValueError(f"pinned_commit is not 40-hex: {self.pinned_commit!r}")

    @property
    def full_name(self) -> str:
        return f"{self.owner}/{self.name}"

    @property
    def clone_url(self) -> str:
        return f"{self.host_url.rstrip('/')}/{self.owner}/{self.name}"

    def to_dict(self) -> dict:
        return {
            "host_url": self.host_url,
            "owner": self.owner,
            "name": self.name,
            "stars": self.stars,
            "pinned_commit": self.pinned_commit,
            "assertion_count": self.assertion_count,
        }

    @classmethod
    def from_url(cls, url: str, stars: int = -1) -> "RepoRef":
        parsed = urlparse(url if "://" in url else f"https://{url}")
        parts = [p for p in parsed.path.split("/") if p]
        if len(parts) < 2:
            raise ValueError(f"cannot parse owner/name from url: {url}")
        name = parts[1].removesuffix(".git")
        host = f"{parsed.scheme}://{parsed.netloc}" if parsed.netloc else url
        return cls(host_url=host, owner=parts[0], name=name, stars=stars)


@dataclass
class FilterCriteria:
    min_stars: int = 500
    min_assertions: int = 50
    source_path_filter: str = "src/main/java"

    def __post_init__(self):
        if self.min_stars < 0 or self.min_assertions < 0:
            raise ValueError("thresholds must be non-negative")
        if not self.source_path_filter:
            raise ValueError("source_path_filter must be non-empty")


def line_is_production_assert(line: str) -> bool:
    """Screening rule: after leading whitespace the line does not start a
    comment and begins an `assert` token followed by whitespace and a word
    character."""
    s = line.lstrip()
    if s.startswith("//") or s.startswith("*"):
        return False
    return re.match(r"assert\s+\w", s) is not None


def count_production_assertions(
    repo_root: str | Path, criteria: FilterCriteria
) -> tuple[int, int]:
    """(assert line count, unreadable-file count) over matching sources."""
    root = Path(repo_root)
    if not root.is_dir():
        raise IOError(f"repository root not readable: {root}")
    prefix = criteria.source_path_filter.rstrip("/") + "/"

    def count_file(p: Path) -> int:
        try:
            text = p.read_text(encoding="utf-8", errors="replace")
        except OSError:
            return -1
        return sum(1 for ln in text.splitlines() if line_is_production_assert(ln))

    files = []
    for p in sorted(root.rglob("*.java")):
        rel = p.relative_to(root).as_posix()
        if not (rel.startswith(prefix) or (rel + "/").startswith(prefix)):
            continue
        if is_test_path(rel):
            continue
        files.append(p)
    total = 0
    warnings = 0
    with ThreadPoolExecutor(max_workers=8) as pool:
        for n in pool.map(count_file, files):
            if n < 0:
                warnings += 1
            else:
                total += n
    if warnings:
        log.warning("%d unreadable files skipped under %s", warnings, root)
    return total, warnings


@dataclass
class FilterReport:
    accepted: list[RepoRef]
    errors: list[tuple[str, str]] = field(default_factory=list)  # (repo, reason)


def filter_repositories(
    candidates: list[RepoRef], criteria: FilterCriteria
) -> FilterReport:
    """Candidates meeting both thresholds, input order preserved."""
    accepted: list[RepoRef] = []
    errors: list[tuple[str, str]] = []
    for repo in candidates:
        if repo.stars < 0:
            errors.append((repo.full_name, "stars unknown"))
            continue
        if repo.assertion_count < 0:
            errors.append((repo.full_name, "assertion count unknown"))
            continue
        if repo.stars >= criteria.min_stars and repo.assertion_count >= criteria.min_assertions:
            accepted.append(repo)
    return FilterReport(accepted=accepted, errors=errors)


# -- star metadata -----------------------------------------------------------


class StarsClient:
    """Hosting-service star counts with a JSON disk cache and an optional
    fully-offline override file ({"owner/name": stars})."""

    def __init__(
        self,
        cache_path: str | Path | None = None,
        stars_file: str | Path | None = None,
        api_base: str = "https://api.github.com",
        token: str | None = None,
    ):
        self.cache_path = Path(cache_path) if cache_path else None
        self.api_base = api_base.rstrip("/")
        self.token = token if token is not None else os.environ.get(GH_TOKEN_ENV)
        self._cache: dict[str, int] = {}
        self._offline: dict[str, int] | None = None
        if self.cache_path and self.cache_path.exists():
            self._cache = json.loads(self.cache_path.read_text(encoding="utf-8"))
        if stars_file:
            self._offline = json.loads(Path(stars_file).read_text(encoding="utf-8"))

    def stars(self, repo: RepoRef) -> int:
        key = repo.full_name
        if self._offline is not None:
            if key not in self._offline:
                raise KeyError(f"{key} not present in stars file")
            return int(self._offline[key])
        if key in self._cache:
            return self._cache[key]
        import requests

        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        resp = requests.get(
            f"{self.api_base}/repos/{repo.owner}/{repo.name}",
            headers=headers,
            timeout=30,
        )
        resp.raise_for_status()
        count = int(resp.json()["stargazers_count"])
        self._cache[key] = count
        if self.cache_path:
            self.cache_path.parent.mkdir(parents=True, exist_ok=True)
            self.cache_path.write_text(
                json.dumps(self._cache, indent=2, sort_keys=True), encoding="utf-8"
            )
        return count


# -- cloning -----------------------------------------------------------------


def clone_pinned(repo: RepoRef, dest: str | Path) -> str:
    """Clone into an absent/empty dest and check out the pinned commit.

    When no pin is set, the head commit becomes the pin. Returns the
    checked-out commit id.
    """
    dest = Path(dest)
    if dest.exists() and any(dest.iterdir()):
        raise FileExistsError(f"clone destination is not empty: {dest}")
    try:
        subprocess.run(
            ["git", "clone", "--quiet", repo.clone_url, str(dest)],
            check=True,
            capture_output=True,
            text=True,
        )
        if repo.pinned_commit:
            subprocess.run(
                ["git", "checkout", "--quiet", repo.pinned_commit],
                cwd=dest,
                check=True,
                capture_output=True,
                text=True,
            )
        head = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            cwd=dest,
            check=True,
            capture_output=True,
            text=True,
        ).stdout.strip()
    except subprocess.CalledProcessError as e:
        import shutil

        if dest.exists():
            shutil.rmtree(dest, ignore_errors=True)
        raise ConnectionError(
            f"clone of {repo.clone_url} failed: {e.stderr.strip()}"
        ) from e
    if not repo.pinned_commit:
        repo.pinned_commit = head
    return head


# -- candidate list I/O ------------------------------------------------------


def load_candidates(path: str | Path) -> list[RepoRef]:
    """JSON array of {"url": ..., "stars": optional} entries."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, list):
        raise ValueError("candidate file must hold a JSON array")
    out = []
    for entry in doc:
        out.append(RepoRef.from_url(entry["url"], stars=entry.get("stars", -1)))
    return out


def save_accepted(repos: list[RepoRef], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([r.to_dict() for r in repos], indent=2) + "\n", encoding="utf-8"
    )
