"""OEIS search client with a local response cache and offline fixtures.

Lookups are a diagnostic aid (checking whether generated sequences are
already catalogued), never part of any correctness claim, so the client
is built to degrade gracefully: network trouble yields an explicit
"unavailable" result instead of an exception, live requests are
rate-limited and serialized, and every result records where it came from
(live, cache, or fixture). Tests run entirely from fixtures; the cache
and fixture files share one format, so a recorded live response can be
promoted to a fixture by copying the file.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import requests

SEARCH_URL = "https://oeis.org/search"
CACHE_ENV_VAR = "LDS4_OEIS_CACHE"
USER_AGENT = "lds4-sequence-toolkit/0.1"
MIN_TERMS = 4


class LookupSource(enum.Enum):
    LIVE = "live"
    CACHE = "cache"
    FIXTURE = "fixture"


class OeisResponseError(RuntimeError):
    """The service answered with something the parser does not recognize."""

    def __init__(self, message: str, payload: str):
        super().__init__(message)
        self.payload = payload


@dataclass(frozen=True)
class OeisMatch:
    sequence_id: str
    name: str
    matched_prefix_length: int


@dataclass(frozen=True)
class LookupResult:
    """Outcome of one lookup; ``status`` is "ok" or "unavailable"."""

    status: str
    query: str
    matches: Tuple[OeisMatch, ...] = ()
    source: Optional[LookupSource] = None
    message: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _query_string(terms: Sequence[int]) -> str:
    return ",".join(str(int(t)) for t in terms)


def _cache_key(query: str) -> str:
    return hashlib.sha256(query.encode("ascii")).hexdigest()[:32]


def _matched_prefix_length(terms: Sequence[int], data: Sequence[int]) -> int:
    best = 0
    for start in range(len(data)):
        length = 0
        while (
            length < len(terms)
            and start + length < len(data)
            and data[start + length] == terms[length]
        ):
            length += 1
        best = max(best, length)
        if best == len(terms):
            break
    return best


def parse_search_response(text: str, terms: Sequence[int]) -> List[OeisMatch]:
    """Parse the JSON search payload into ordered matches.

    Accepts both response shapes the service has used: an object with a
    ``results`` list, or a bare list of entries.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OeisResponseError(f"response is not JSON: {exc}", text) from exc
    if isinstance(payload, dict):
        results = payload.get("results")
        if results is None:
            results = []
    elif isinstance(payload, list):
        results = payload
    else:
        raise OeisResponseError("unexpected top-level JSON type", text)
    matches = []
    for entry in results:
        if not isinstance(entry, dict) or "number" not in entry:
            raise OeisResponseError("entry without an A-number", text)
        number = int(entry["number"])
        data_field = str(entry.get("data", ""))
        try:
            data = [int(v) for v in data_field.split(",") if v.strip()]
        except ValueError as exc:
            raise OeisResponseError(f"unparseable data field: {exc}", text) from exc
        matches.append(
            OeisMatch(
                sequence_id=f"A{number:06d}",
                name=str(entry.get("name", "")),
                matched_prefix_length=_matched_prefix_length(terms, data),
            )
        )
    return matches


class OeisClient:
    """Cache-first OEIS search client; see module docstring for the contract."""

    _live_lock = threading.Lock()
    _last_live_request = 0.0

    def __init__(
        self,
        cache_dir: Optional[os.PathLike] = None,
        fixture_dir: Optional[os.PathLike] = None,
        min_request_interval: float = 2.0,
        timeout: float = 15.0,
    ):
        if cache_dir is None:
            cache_dir = os.environ.get(CACHE_ENV_VAR) or (
                Path.home() / ".cache" / "lds4" / "oeis"
            )
        self.cache_dir = Path(cache_dir)
        self.fixture_dir = Path(fixture_dir) if fixture_dir is not None else None
        self.min_request_interval = min_request_interval
        self.timeout = timeout

    # -- storage -------------------------------------------------------

    def _stored_response(self, directory: Path, query: str) -> Optional[str]:
        path = directory / f"{_cache_key(query)}.json"
        if not path.is_file():
            return None
        try:
            stored = json.loads(path.read_text(encoding="utf-8"))
            return stored["response_text"]
        except (OSError, json.JSONDecodeError, KeyError):
            return None

    def _store_response(self, query: str, text: str) -> None:
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            path = self.cache_dir / f"{_cache_key(query)}.json"
            path.write_text(
                json.dumps(
                    {
                        "query": query,
                        "fetched_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                        "response_text": text,
                    },
                    indent=2,
                ),
                encoding="utf-8",
            )
        except OSError:
            pass  # caching is best-effort; the result is already in hand

    # -- transport -----------------------------------------------------

    def _fetch_live(self, query: str) -> str:
        cls = type(self)
        with cls._live_lock:
            wait = cls._last_live_request + self.min_request_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            try:
                response = requests.get(
                    SEARCH_URL,
                    params={"q": query, "fmt": "json"},
                    headers={"User-Agent": USER_AGENT},
                    timeout=self.timeout,
                )
            finally:
                cls._last_live_request = time.monotonic()
        response.raise_for_status()
        return response.text

    # -- public API ------------------------------------------------------

    def lookup(self, terms: Sequence[int], source_policy: str = "cache-first") -> LookupResult:
        """Search for a term prefix; never raises on network failure.

        ``source_policy`` is one of "cache-first" (default), "live",
        "cache-only", or "fixture".
        """
        terms = [int(t) for t in terms]
        if len(terms) < MIN_TERMS:
            raise ValueError(f"need at least {MIN_TERMS} terms to search")
        query = _query_string(terms)
        if source_policy == "fixture":
            return self._from_storage(self.fixture_dir, query, terms, LookupSource.FIXTURE)
        if source_policy == "cache-only":
            return self._from_storage(self.cache_dir, query, terms, LookupSource.CACHE)
        if source_policy == "cache-first":
            cached = self._stored_response(self.cache_dir, query)
            if cached is not None:
                return self._build(cached, query, terms, LookupSource.CACHE)
            return self._lookup_live(query, terms)
        if source_policy == "live":
            return self._lookup_live(query, terms)
        raise ValueError(f"unknown source policy: {source_policy!r}")

    def _from_storage(
        self,
        directory: Optional[Path],
        query: str,
        terms: Sequence[int],
        source: LookupSource,
    ) -> LookupResult:
        if directory is None:
            return LookupResult(
                "unavailable", query, message=f"no {source.value} directory configured"
            )
        text = self._stored_response(directory, query)
        if text is None:
            return LookupResult(
                "unavailable", query, message=f"query not present in {source.value} store"
            )
        return self._build(text, query, terms, source)

    def _lookup_live(self, query: str, terms: Sequence[int]) -> LookupResult:
        try:
            text = self._fetch_live(query)
        except requests.RequestException as exc:
            return LookupResult(
                "unavailable", query, source=LookupSource.LIVE, message=str(exc)
            )
        self._store_response(query, text)
        return self._build(text, query, terms, LookupSource.LIVE)

    def _build(
        self, text: str, query: str, terms: Sequence[int], source: LookupSource
    ) -> LookupResult:
        matches = tuple(parse_search_response(text, terms))
        return LookupResult("ok", query, matches=matches, source=source)


def lookup(
    terms: Sequence[int],
    source_policy: str = "cache-first",
    cache_dir: Optional[os.PathLike] = None,
    fixture_dir: Optional[os.PathLike] = None,
) -> LookupResult:
    """Module-level convenience wrapper around :class:`OeisClient`."""
    client = OeisClient(cache_dir=cache_dir, fixture_dir=fixture_dir)
    return client.lookup(terms, source_policy=source_policy)
