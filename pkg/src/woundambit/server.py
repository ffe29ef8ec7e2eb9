"""Local annotation service: serves the review UI bundle and a small JSON API.

Variant blinding happens here: the task list exposes only opaque tokens in a
per-image shuffled order, and tokens are mapped back to variant names when a
rating is stored. The ratings file is a single JSON document rewritten
atomically under one lock.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import random
import tempfile
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidInputError
from .expert import RATINGS_SCHEMA
from .mask import load_image, load_mask

log = logging.getLogger(__name__)

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


class AnnotationStore:
    """Task inventory plus the append-merged ratings file."""

    def __init__(self, images_dir, variant_dirs: dict, ratings_path, seed: int | None = None):
        self.images_dir = Path(images_dir)
        self.variant_dirs = {name: Path(p) for name, p in variant_dirs.items()}
        self.ratings_path = Path(ratings_path)
        self.lock = threading.Lock()
        self.variants = sorted(self.variant_dirs)
        self.seed = seed
        self._salt = f"{seed if seed is not None else random.SystemRandom().random()}"

        stems = sorted(p.stem for p in self.images_dir.iterdir() if p.suffix.lower() == ".png")
        if not stems:
            raise InvalidInputError(f"no PNG images in {self.images_dir}")
        for name, d in self.variant_dirs.items():
            missing = [s for s in stems if not (d / f"{s}.png").exists()]
            if missing:
                raise InvalidInputError(f"variant {name!r} lacks masks for {missing}")
        self.images = stems

    def token(self, image: str, variant: str) -> str:
        digest = hashlib.sha256(f"{self._salt}|{image}|{variant}".encode()).hexdigest()
        return digest[:16]

    def resolve(self, image: str, token: str) -> str:
        for variant in self.variants:
            if self.token(image, variant) == token:
                return variant
        raise KeyError(token)

    def tasks(self) -> list:
        rng = random.Random(self.seed)
        order = list(self.images)
        rng.shuffle(order)
        out = []
        for image in order:
            tokens = [self.token(image, v) for v in self.variants]
            rng.shuffle(tokens)
            out.append({"image": image, "overlays": tokens})
        return out

    def image_path(self, image: str) -> Path:
        if image not in self.images:
            raise KeyError(image)
        return self.images_dir / f"{image}.png"

    def mask_path(self, image: str, variant: str) -> Path:
        return self.variant_dirs[variant] / f"{image}.png"

    def _read_ratings(self) -> dict:
        if self.ratings_path.exists():
            with open(self.ratings_path) as f:
                return json.load(f)
        return {"schema": RATINGS_SCHEMA, "raters": [], "variants": self.variants, "records": []}

    def submit(self, record: dict) -> str:
        """Validate, unblind and persist one record. Returns 'stored',
        'duplicate' (identical resubmit) or raises on conflict/bad input."""
        for key in ("image", "rater", "verdicts", "best", "height_mm", "width_mm"):
            if key not in record:
                raise InvalidInputError(f"missing field {key!r}")
        image = record["image"]
        if image not in self.images:
            raise InvalidInputError(f"unknown image {image!r}")
        try:
            verdicts = {
                self.resolve(image, tok): verdict for tok, verdict in record["verdicts"].items()
            }
            best = self.resolve(image, record["best"])
        except KeyError as e:
            raise InvalidInputError(f"unknown overlay token {e}") from e
        if set(verdicts) != set(self.variants):
            raise InvalidInputError("verdicts must cover every variant exactly once")
        if any(v not in ("good", "bad") for v in verdicts.values()):
            raise InvalidInputError("verdicts must be 'good' or 'bad'")
        h, w = record["height_mm"], record["width_mm"]
        if not (isinstance(h, (int, float)) and isinstance(w, (int, float)) and h > 0 and w > 0):
            raise InvalidInputError("height_mm and width_mm must be positive numbers")

        stored = {
            "image": image,
            "rater": record["rater"],
            "verdicts": verdicts,
            "best": best,
            "height_mm": h,
            "width_mm": w,
        }
        with self.lock:
            data = self._read_ratings()
            for existing in data["records"]:
                if existing["image"] == image and existing["rater"] == record["rater"]:
                    if existing == stored:
                        return "duplicate"
                    raise ConflictError(f"rating for {image!r} by {record['rater']!r} already exists")
            data["records"].append(stored)
            if record["rater"] not in data["raters"]:
                data["raters"].append(record["rater"])
            data["variants"] = self.variants
            fd, tmp = tempfile.mkstemp(dir=self.ratings_path.parent or Path("."), suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as f:
                    json.dump(data, f, indent=2)
                os.replace(tmp, self.ratings_path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return "stored"

    def overlay_png(self, image: str, token: str) -> bytes:
        variant = self.resolve(image, token)
        photo = load_image(self.image_path(image))
        mask = load_mask(self.mask_path(image, variant))
        if photo.ndim == 2:
            photo = np.stack([photo] * 3, axis=-1)
        if mask.shape != photo.shape[:2]:
            raise InvalidInputError(f"mask/image size mismatch for {image!r}")
        out = photo.astype(np.float64)
        out[mask] = 0.5 * out[mask] + 0.5 * np.array([0.0, 220.0, 0.0])
        buf = io.BytesIO()
        Image.fromarray(out.astype(np.uint8), mode="RGB").save(buf, format="PNG")
        return buf.getvalue()


class ConflictError(Exception):
    pass


def make_handler(store: AnnotationStore, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            log.debug("%s - %s", self.address_string(), fmt % args)

        def _send_json(self, obj, status=HTTPStatus.OK):
            body = json.dumps(obj).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_bytes(self, body: bytes, ctype: str, status=HTTPStatus.OK):
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            path = self.path.split("?", 1)[0]
            if path == "/api/tasks":
                self._send_json({"tasks": store.tasks(), "n_variants": len(store.variants)})
                return
            if path.startswith("/api/overlay/"):
                parts = path.split("/")
                if len(parts) == 5:
                    try:
                        png = store.overlay_png(parts[3], parts[4])
                    except (KeyError, InvalidInputError, FileNotFoundError) as e:
                        self._send_json({"error": str(e)}, HTTPStatus.NOT_FOUND)
                        return
                    self._send_bytes(png, "image/png")
                    return
            self._serve_static(path)

        def _serve_static(self, path: str):
            if static_dir is None:
                self._send_json({"error": "UI bundle not installed"}, HTTPStatus.NOT_FOUND)
                return
            rel = "index.html" if path == "/" else path.lstrip("/")
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_json({"error": "not found"}, HTTPStatus.NOT_FOUND)
                return
            ctype = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
            self._send_bytes(target.read_bytes(), ctype)

        def do_POST(self):
            if self.path.split("?", 1)[0] != "/api/ratings":
                self._send_json({"error": "not found"}, HTTPStatus.NOT_FOUND)
                return
            length = int(self.headers.get("Content-Length", 0))
            try:
                record = json.loads(self.rfile.read(length))
                status = store.submit(record)
            except json.JSONDecodeError:
                self._send_json({"error": "invalid JSON"}, HTTPStatus.BAD_REQUEST)
                return
            except InvalidInputError as e:
                self._send_json({"error": str(e)}, HTTPStatus.BAD_REQUEST)
                return
            except ConflictError as e:
                self._send_json({"error": str(e)}, HTTPStatus.CONFLICT)
                return
            self._send_json({"status": status})

    return Handler


def serve_annotate(
    images_dir,
    variant_dirs: dict,
    ratings_path,
    port: int = 8787,
    seed: int | None = None,
    static_dir=None,
) -> ThreadingHTTPServer:
    """Create the annotation HTTP server (caller runs serve_forever)."""
    store = AnnotationStore(images_dir, variant_dirs, ratings_path, seed=seed)
    static = Path(static_dir) if static_dir else None
    if static is not None and not (static / "index.html").exists():
        log.warning("UI bundle missing at %s; API-only mode", static)
        static = None
    try:
        server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(store, static))
    except OSError as e:
        raise InvalidInputError(f"cannot bind port {port}: {e}") from e
    server.store = store
    return server
