"""One-sided window abstraction: in-process store plus a TCP remote-read backend.

Every node exposes two windows (offsets and adjacencies, both u64-element
arrays).  Reads never involve the target node; epoch open/flush/close are
purely local bookkeeping and must never synchronize across nodes.  The
in-process backend returns data eagerly and models latency only in the
accounting: each get is charged ``alpha + bytes * beta`` seconds.
"""

from __future__ import annotations

import enum
import socket
import socketserver
import struct
import threading
from dataclasses import dataclass, field

import numpy as np

from .partition import LocalCsr

RGET_MAGIC = b"RGET"
_REQ = struct.Struct("<4sBQQQ")   # magic, window, target, offset, length
_RESP = struct.Struct("<BQ")      # status, element length

STATUS_OK = 0
STATUS_RANGE = 1
STATUS_PROTO = 2


class WindowId(enum.IntEnum):
    OFFSETS = 0
    ADJACENCY = 1


@dataclass(frozen=True)
class GetRequest:
    target: int
    window: WindowId
    offset: int
    length: int

    def key(self) -> tuple:
        return (self.target, int(self.window), self.offset, self.length)


@dataclass(frozen=True)
class WindowHandle:
    node: int
    window: WindowId
    extent: int  # in u64 elements


@dataclass(frozen=True)
class CostModel:
    alpha: float = 2e-6   # seconds per message
    beta: float = 1e-10   # seconds per byte

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("cost parameters must be non-negative")

    def time(self, length_elems: int) -> float:
        return self.alpha + 8 * length_elems * self.beta


class InvalidStateError(RuntimeError):
    pass


class TransportError(OSError):
    pass


class ProtocolError(RuntimeError):
    pass


class WindowStore:
    """All exposed windows of a simulated machine, shared by every node."""

    def __init__(self):
        self._windows: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def expose(self, local: LocalCsr) -> tuple[WindowHandle, WindowHandle]:
        if local.node in self._windows:
            raise InvalidStateError(f"node {local.node} already exposed its windows")
        offsets = np.ascontiguousarray(local.csr.offsets, dtype=np.int64)
        adj = np.ascontiguousarray(local.csr.adjacencies, dtype=np.int64)
        offsets.setflags(write=False)
        adj.setflags(write=False)
        self._windows[local.node] = (offsets, adj)
        return (WindowHandle(local.node, WindowId.OFFSETS, len(offsets)),
                WindowHandle(local.node, WindowId.ADJACENCY, len(adj)))

    def extent(self, node: int, window: WindowId) -> int:
        return len(self._windows[node][int(window)])

    def read(self, req: GetRequest) -> np.ndarray:
        try:
            arrays = self._windows[req.target]
        except KeyError:
            raise IndexError(f"node {req.target} has no exposed windows") from None
        arr = arrays[int(req.window)]
        if req.offset < 0 or req.length < 0 or req.offset + req.length > len(arr):
            raise IndexError(
                f"get [{req.offset}, {req.offset + req.length}) out of extent "
                f"{len(arr)} on node {req.target} window {req.window.name}")
        return arr[req.offset:req.offset + req.length]

    @property
    def nodes(self) -> list[int]:
        return sorted(self._windows)


@dataclass
class TraceEvent:
    kind: str       # "open" | "get" | "flush" | "close"
    node: int
    target: int = -1
    window: int = -1
    offset: int = 0
    length: int = 0
    cost: float = 0.0


@dataclass
class EpochState:
    open: bool = False
    trace: list[TraceEvent] = field(default_factory=list)
    comm_time: float = 0.0
    bytes_moved: int = 0
    gets: int = 0


class NodePort:
    """A node's access endpoint: epoch state machine plus cost accounting.

    ``fetch`` is the actual data path (in-process store or a TCP client);
    the port itself never talks to other nodes' epoch state.
    """

    def __init__(self, node: int, fetch, cost: CostModel, record_trace: bool = True):
        self.node = node
        self._fetch = fetch
        self.cost = cost
        self.state = EpochState()
        self.record_trace = record_trace

    def open_epoch(self) -> None:
        if self.state.open:
            raise InvalidStateError("epoch already open")
        self.state.open = True
        if self.record_trace:
            self.state.trace.append(TraceEvent("open", self.node))

    def get(self, req: GetRequest) -> np.ndarray:
        if not self.state.open:
            raise InvalidStateError("get outside an access epoch")
        payload = self._fetch(req)
        t = self.cost.time(req.length)
        self.state.comm_time += t
        self.state.bytes_moved += 8 * req.length
        self.state.gets += 1
        if self.record_trace:
            self.state.trace.append(TraceEvent(
                "get", self.node, req.target, int(req.window),
                req.offset, req.length, t))
        return payload

    def flush(self) -> None:
        if not self.state.open:
            raise InvalidStateError("flush outside an access epoch")
        if self.record_trace:
            self.state.trace.append(TraceEvent("flush", self.node))

    def close_epoch(self) -> None:
        if not self.state.open:
            raise InvalidStateError("epoch not open")
        self.state.open = False
        if self.record_trace:
            self.state.trace.append(TraceEvent("close", self.node))


def audit_asynchrony(traces: dict[int, list[TraceEvent]]) -> list[str]:
    """Check that no trace event implies waiting on another node.

    The event vocabulary is open/get/flush/close; anything else, or an
    epoch event recorded against a foreign node, would be a cross-node wait
    edge.  Returns violations (empty means the asynchrony contract holds).
    """
    allowed = {"open", "get", "flush", "close"}
    out = []
    for node, trace in traces.items():
        open_ = False
        for ev in trace:
            if ev.kind not in allowed:
                out.append(f"node {node}: cross-node sync event {ev.kind!r}")
            if ev.node != node:
                out.append(f"node {node}: event recorded against node {ev.node}")
            if ev.kind == "open":
                open_ = True
            elif ev.kind == "close":
                open_ = False
            elif not open_:
                out.append(f"node {node}: {ev.kind} outside epoch")
    return out


# --- TCP backend -----------------------------------------------------------

class _RgetHandler(socketserver.BaseRequestHandler):
    def handle(self):
        sock = self.request
        while True:
            header = _recv_exact(sock, _REQ.size)
            if header is None:
                return
            magic, window, target, offset, length = _REQ.unpack(header)
            if magic != RGET_MAGIC or window not in (0, 1):
                sock.sendall(_RESP.pack(STATUS_PROTO, 0))
                return  # drop the connection on protocol errors
            req = GetRequest(int(target), WindowId(window), int(offset), int(length))
            try:
                payload = self.server.store.read(req)
            except IndexError:
                sock.sendall(_RESP.pack(STATUS_RANGE, 0))
                continue
            sock.sendall(_RESP.pack(STATUS_OK, len(payload))
                         + payload.astype("<u8").tobytes())


def _recv_exact(sock: socket.socket, size: int) -> bytes | None:
    buf = b""
    while len(buf) < size:
        try:
            chunk = sock.recv(size - len(buf))
        except (ConnectionResetError, OSError):
            return None
        if not chunk:
            return None
        buf += chunk
    return buf


class WindowServer(socketserver.ThreadingTCPServer):
    """Serves one-sided reads for every window in a WindowStore."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, store: WindowStore, address: tuple[str, int] = ("127.0.0.1", 0)):
        super().__init__(address, _RgetHandler)
        self.store = store
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[:2]

    def start(self) -> "WindowServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join()


def tcp_serve(store: WindowStore, address: tuple[str, int] = ("127.0.0.1", 0)) -> WindowServer:
    """Start a server exposing all windows in the store; returns the handle."""
    return WindowServer(store, address).start()


class TcpTransport:
    """Client side of the remote-read protocol; one socket per peer address.

    ``peers`` maps a target node id to an address; a single address serves
    all targets when every window lives behind one server.
    """

    def __init__(self, peers: dict[int, tuple[str, int]] | tuple[str, int]):
        if isinstance(peers, tuple):
            self._route = None
            self._default = peers
        else:
            self._route = dict(peers)
            self._default = None
        self._socks: dict[tuple[str, int], socket.socket] = {}
        self._lock = threading.Lock()

    def _sock_for(self, target: int) -> socket.socket:
        addr = self._default if self._route is None else self._route[target]
        sock = self._socks.get(addr)
        if sock is None:
            try:
                sock = socket.create_connection(addr)
            except OSError as e:
                raise TransportError(f"cannot reach {addr}: {e}") from e
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            self._socks[addr] = sock
        return sock

    def get(self, req: GetRequest) -> np.ndarray:
        with self._lock:
            sock = self._sock_for(req.target)
            frame = _REQ.pack(RGET_MAGIC, int(req.window), req.target,
                              req.offset, req.length)
            try:
                sock.sendall(frame)
                header = _recv_exact(sock, _RESP.size)
            except OSError as e:
                raise TransportError(str(e)) from e
            if header is None:
                raise TransportError("connection closed by server")
            status, length = _RESP.unpack(header)
            if status == STATUS_RANGE:
                raise IndexError(f"remote range error for {req}")
            if status != STATUS_OK:
                raise ProtocolError(f"server rejected request (status {status})")
            data = _recv_exact(sock, 8 * length)
            if data is None:
                raise TransportError("truncated response payload")
        return np.frombuffer(data, dtype="<u8").astype(np.int64)

    def close(self) -> None:
        for sock in self._socks.values():
            try:
                sock.close()
            except OSError:
                pass
        self._socks.clear()

    def __call__(self, req: GetRequest) -> np.ndarray:
        return self.get(req)
