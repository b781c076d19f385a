"""Multi-server simulation over a framed wire protocol.

Frame layout (all integers little-endian)::

    u32 length      payload size + 1
    u8  tag         0x01 STORE, 0x02 QUERY, 0x03 ANSWER,
                    0x04 SCHEME_DIGEST, 0x05 ERROR
    ... payload

Payloads:

    STORE          digest[32] u32 server u32 p u32 m u64 modulus[m+1]
                   u32 K u32 L u64 Y[K*L]
    QUERY          digest[32] u32 server u32 K u32 L u64 D[K*L]
    ANSWER         u32 server u64 value
    SCHEME_DIGEST  digest[32]
    ERROR          u8 code, utf-8 message

A STORE is acknowledged with a SCHEME_DIGEST frame carrying the server's
digest.  Servers never see scheme matrices, only their own share.
"""

from __future__ import annotations

import logging
import socket
import socketserver
import struct
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from enum import IntEnum

import numpy as np

from .gf import FieldParams
from .protocol import (Answer, Database, Query, StorageShare, decode, encode_storage,
                       gen_queries, make_rng, server_answer)
from .scheme import SchemeSpec

log = logging.getLogger(__name__)

STORE = 0x01
QUERY = 0x02
ANSWER = 0x03
SCHEME_DIGEST = 0x04
ERROR = 0x05
TAGS = (STORE, QUERY, ANSWER, SCHEME_DIGEST, ERROR)

DIGEST_SIZE = 32
MAX_FRAME = 1 << 30
DEFAULT_TIMEOUT = 10.0


class ErrorCode(IntEnum):
    BadTag = 1
    BadLength = 2
    DigestMismatch = 3
    NoShareInstalled = 4


class FrameError(ValueError):
    def __init__(self, code: ErrorCode, message: str = ""):
        super().__init__(f"{code.name}: {message}" if message else code.name)
        self.code = code


class RemoteError(RuntimeError):
    def __init__(self, server: int, code: int, message: str):
        name = ErrorCode(code).name if code in ErrorCode._value2member_map_ else str(code)
        super().__init__(f"server {server} replied {name}: {message}")
        self.server = server
        self.code = code


class Timeout(RuntimeError):
    def __init__(self, server: int, reason: str = ""):
        super().__init__(f"server {server} timed out" + (f" ({reason})" if reason else ""))
        self.server = server


# ----------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class WireFrame:
    tag: int
    payload: bytes = b""

    @property
    def length(self) -> int:
        return len(self.payload) + 1

    def encode(self) -> bytes:
        return struct.pack("<IB", self.length, self.tag) + self.payload

    @classmethod
    def decode(cls, data: bytes) -> "WireFrame":
        if len(data) < 5:
            raise FrameError(ErrorCode.BadLength, "frame shorter than header")
        length, tag = struct.unpack_from("<IB", data)
        if length != len(data) - 4:
            raise FrameError(ErrorCode.BadLength, f"length {length}, got {len(data) - 4}")
        if tag not in TAGS:
            raise FrameError(ErrorCode.BadTag, f"tag 0x{tag:02x}")
        return cls(tag, bytes(data[5:]))


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("connection closed mid-frame")
        buf += chunk
    return bytes(buf)


def read_frame_bytes(sock: socket.socket) -> bytes:
    head = _recv_exact(sock, 4)
    (length,) = struct.unpack("<I", head)
    if length == 0 or length > MAX_FRAME:
        raise FrameError(ErrorCode.BadLength, f"length {length}")
    return head + _recv_exact(sock, length)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FrameError(ErrorCode.BadLength, "payload truncated")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64s(self, n: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * n), dtype="<u8").astype(np.int64)

    def done(self) -> None:
        if self.pos != len(self.data):
            raise FrameError(ErrorCode.BadLength, "trailing payload bytes")


def _u64s(a) -> bytes:
    return np.asarray(a, dtype="<u8").tobytes()


def _matrix(r: _Reader) -> np.ndarray:
    K, L = r.u32(), r.u32()
    return r.u64s(K * L).reshape(K, L)


def store_frame(digest: bytes, share: StorageShare) -> WireFrame:
    F = share.field
    K, L = share.Y.shape
    payload = (digest + struct.pack("<III", share.server_index, F.p, F.m)
               + _u64s(F.modulus) + struct.pack("<II", K, L) + _u64s(share.Y))
    return WireFrame(STORE, payload)


def parse_store(payload: bytes) -> tuple[bytes, StorageShare]:
    r = _Reader(payload)
    digest = r.take(DIGEST_SIZE)
    n, p, m = r.u32(), r.u32(), r.u32()
    modulus = tuple(int(c) for c in r.u64s(m + 1))
    Y = _matrix(r)
    r.done()
    try:
        F = FieldParams(p, m, modulus)
        F.order
    except (ValueError, ArithmeticError) as exc:
        raise FrameError(ErrorCode.BadLength, f"bad field description: {exc}") from exc
    if Y.size and (Y.min() < 0 or Y.max() >= F.order):
        raise FrameError(ErrorCode.BadLength, "share element out of field range")
    return digest, StorageShare(n, Y, F)


def query_frame(digest: bytes, query: Query) -> WireFrame:
    K, L = query.D.shape
    return WireFrame(QUERY, digest + struct.pack("<III", query.server_index, K, L) + _u64s(query.D))


def parse_query(payload: bytes) -> tuple[bytes, Query]:
    r = _Reader(payload)
    digest = r.take(DIGEST_SIZE)
    n = r.u32()
    D = _matrix(r)
    r.done()
    return digest, Query(n, D)


def answer_frame(answer: Answer) -> WireFrame:
    return WireFrame(ANSWER, struct.pack("<IQ", answer.server_index, answer.value))


def parse_answer(payload: bytes) -> Answer:
    if len(payload) != 12:
        raise FrameError(ErrorCode.BadLength, "answer payload must be 12 bytes")
    n, v = struct.unpack("<IQ", payload)
    return Answer(n, v)


def error_frame(code: ErrorCode, message: str = "") -> WireFrame:
    return WireFrame(ERROR, bytes([int(code)]) + message.encode("utf-8"))


def parse_error(payload: bytes) -> tuple[int, str]:
    if not payload:
        return 0, ""
    return payload[0], payload[1:].decode("utf-8", errors="replace")


# ----------------------------------------------------------------------
# servers


@dataclass(frozen=True)
class LogEntry:
    time: float
    direction: str  # "in" or "out"
    tag: int
    data: object


class Server:
    """Sequential actor holding one share; answers QUERY frames."""

    def __init__(self, server_index: int, scheme_digest: bytes):
        if len(scheme_digest) != DIGEST_SIZE:
            raise ValueError("scheme digest must be 32 bytes")
        self.server_index = server_index
        self.digest = bytes(scheme_digest)
        self.share: StorageShare | None = None
        self.log: list[LogEntry] = []
        self._lock = threading.Lock()

    def _record(self, direction, tag, data):
        self.log.append(LogEntry(time.time(), direction, tag, data))

    def _check_digest(self, digest: bytes) -> None:
        if digest != self.digest:
            raise FrameError(ErrorCode.DigestMismatch, "client scheme differs from server scheme")

    def _dispatch(self, frame: WireFrame) -> WireFrame:
        if frame.tag == STORE:
            digest, share = parse_store(frame.payload)
            self._check_digest(digest)
            if share.server_index != self.server_index:
                raise FrameError(ErrorCode.BadLength, f"share addressed to {share.server_index}")
            self.share = share
            self._record("in", STORE, share.Y.copy())
            return WireFrame(SCHEME_DIGEST, self.digest)
        if frame.tag == QUERY:
            digest, query = parse_query(frame.payload)
            self._check_digest(digest)
            if self.share is None:
                raise FrameError(ErrorCode.NoShareInstalled)
            if query.server_index != self.server_index or query.D.shape != self.share.Y.shape:
                raise FrameError(ErrorCode.BadLength, "query does not fit the installed share")
            self._record("in", QUERY, query.D.copy())
            ans = server_answer(self.share, query)
            self._record("out", ANSWER, ans.value)
            return answer_frame(ans)
        if frame.tag == SCHEME_DIGEST:
            if len(frame.payload) != DIGEST_SIZE:
                raise FrameError(ErrorCode.BadLength, "digest must be 32 bytes")
            self._check_digest(frame.payload)
            return WireFrame(SCHEME_DIGEST, self.digest)
        raise FrameError(ErrorCode.BadTag, f"servers do not accept tag 0x{frame.tag:02x}")

    def handle(self, raw: bytes) -> bytes:
        with self._lock:
            try:
                reply = self._dispatch(WireFrame.decode(raw))
            except FrameError as exc:
                log.debug("server %d: %s", self.server_index, exc)
                reply = error_frame(exc.code, str(exc))
            return reply.encode()


# ----------------------------------------------------------------------
# transports


class Transport:
    """Delivers one request frame to server ``n`` and returns the reply."""

    def request(self, n: int, raw: bytes, timeout: float = DEFAULT_TIMEOUT) -> bytes:
        raise NotImplementedError

    @property
    def size(self) -> int:
        raise NotImplementedError


class ChannelTransport(Transport):
    """In-process transport; ``None`` entries simulate servers that are down."""

    def __init__(self, servers: list[Server | None]):
        self.servers = list(servers)

    @classmethod
    def spawn(cls, N: int, scheme_digest: bytes) -> "ChannelTransport":
        return cls([Server(n, scheme_digest) for n in range(N)])

    @property
    def size(self) -> int:
        return len(self.servers)

    def request(self, n, raw, timeout=DEFAULT_TIMEOUT):
        srv = self.servers[n]
        if srv is None:
            raise Timeout(n, "no endpoint")
        return srv.handle(raw)


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        while True:
            try:
                raw = read_frame_bytes(self.request)
            except FrameError as exc:
                self.request.sendall(error_frame(exc.code, str(exc)).encode())
                return
            except (ConnectionError, OSError):
                return
            self.request.sendall(self.server.actor.handle(raw))


class _TCPServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True


class ServeHandle:
    """A running TCP endpoint for one server actor."""

    def __init__(self, endpoint, actor: Server):
        self.actor = actor
        self._srv = _TCPServer(endpoint, _Handler)
        self._srv.actor = actor
        self._thread = threading.Thread(target=self._srv.serve_forever, args=(0.05,), daemon=True)
        self._thread.start()

    @property
    def address(self) -> tuple[str, int]:
        return self._srv.server_address[:2]

    def shutdown(self) -> None:
        self._srv.shutdown()
        self._srv.server_close()
        self._thread.join()


def serve(endpoint, server_index: int, scheme_digest: bytes) -> ServeHandle:
    """Start serving at ``(host, port)``; port 0 picks a free port."""
    return ServeHandle(tuple(endpoint), Server(server_index, scheme_digest))


class TcpTransport(Transport):
    def __init__(self, addresses: list[tuple[str, int]]):
        self.addresses = [tuple(a) for a in addresses]

    @property
    def size(self) -> int:
        return len(self.addresses)

    def request(self, n, raw, timeout=DEFAULT_TIMEOUT):
        try:
            with socket.create_connection(self.addresses[n], timeout=timeout) as sock:
                sock.sendall(raw)
                return read_frame_bytes(sock)
        except (socket.timeout, ConnectionError, OSError) as exc:
            raise Timeout(n, str(exc)) from exc


def read_addresses(path) -> list[tuple[str, int]]:
    """Parse a server list: one ``host:port`` per line, ``#`` comments allowed."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            host, _, port = line.rpartition(":")
            if not host or not port.isdigit():
                raise ValueError(f"bad address line {line!r}, expected host:port")
            out.append((host, int(port)))
    return out


# ----------------------------------------------------------------------
# client


def _expect(n: int, raw: bytes, tag: int) -> WireFrame:
    frame = WireFrame.decode(raw)
    if frame.tag == ERROR:
        raise RemoteError(n, *parse_error(frame.payload))
    if frame.tag != tag:
        raise RemoteError(n, 0, f"unexpected tag 0x{frame.tag:02x}")
    return frame


class Client:
    """Talks to ``N`` servers through one transport, concurrently."""

    def __init__(self, transport: Transport, scheme: SchemeSpec, scheme_digest: bytes,
                 timeout: float = DEFAULT_TIMEOUT):
        if transport.size != scheme.N:
            raise ValueError(f"transport has {transport.size} endpoints, scheme needs {scheme.N}")
        self.transport = transport
        self.scheme = scheme
        self.digest = scheme_digest
        self.timeout = timeout

    def _fan_out(self, frames: list[WireFrame], tag: int) -> list[WireFrame]:
        def one(n):
            return _expect(n, self.transport.request(n, frames[n].encode(), self.timeout), tag)

        with ThreadPoolExecutor(max_workers=min(32, len(frames))) as pool:
            futures = [pool.submit(one, n) for n in range(len(frames))]
            return [f.result() for f in futures]

    def check_digests(self) -> None:
        self._fan_out([WireFrame(SCHEME_DIGEST, self.digest)] * self.scheme.N, SCHEME_DIGEST)

    def store(self, shares: list[StorageShare]) -> None:
        self._fan_out([store_frame(self.digest, s) for s in shares], SCHEME_DIGEST)

    def retrieve(self, theta: int, K: int, rng=None) -> np.ndarray:
        queries = gen_queries(self.scheme, theta, K, rng)
        replies = self._fan_out([query_frame(self.digest, q) for q in queries], ANSWER)
        answers = [parse_answer(f.payload) for f in replies]
        return decode(self.scheme, answers)


@dataclass
class Session:
    """Outcome of a seeded store-then-retrieve run plus the server actors' logs."""

    decoded: np.ndarray
    servers: dict[int, Server] = dc_field(default_factory=dict)


def run_session(transport: Transport, scheme: SchemeSpec, scheme_digest: bytes, db: Database,
                theta: int, seed=None, servers: list[Server] | None = None,
                timeout: float = DEFAULT_TIMEOUT) -> Session:
    """Store ``db`` and retrieve file ``theta``.

    Randomness is drawn exactly as in :func:`protocol.run_pipeline`, so the
    result is bit-identical to the in-process pipeline for the same seed.
    """
    rng = make_rng(seed)
    client = Client(transport, scheme, scheme_digest, timeout)
    client.store(encode_storage(scheme, db, rng))
    decoded = client.retrieve(theta, db.K, rng)
    if servers is None and isinstance(transport, ChannelTransport):
        servers = transport.servers
    known = {s.server_index: s for s in servers or [] if s is not None}
    return Session(decoded, known)


# ----------------------------------------------------------------------
# collusion


@dataclass(frozen=True)
class ServerView:
    shares: tuple
    queries: tuple
    answers: tuple
    timestamps: tuple


@dataclass(frozen=True)
class CollusionTranscript:
    coalition: frozenset
    views: dict

    def query_matrix(self, n: int, i: int = -1) -> np.ndarray:
        return self.views[n].queries[i]


def record_collusion(coalition, session) -> CollusionTranscript:
    """Collect what the coalition's servers logged; nothing client-side."""
    servers = session.servers if isinstance(session, Session) else session
    coalition = frozenset(int(n) for n in coalition)
    views = {}
    for n in sorted(coalition):
        if n not in servers:
            raise KeyError(f"no log for server {n}")
        entries = servers[n].log
        pick = lambda tag: tuple(e.data for e in entries if e.tag == tag)  # noqa: E731
        views[n] = ServerView(pick(STORE), pick(QUERY), pick(ANSWER),
                              tuple(e.time for e in entries))
    return CollusionTranscript(coalition, views)
