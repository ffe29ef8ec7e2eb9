// Round trip against the real annotate service: a scripted session rates
// 3 images x 2 variants through the HTTP API, then the eval subcommand
// consumes the resulting ratings file unchanged.
import { type ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApiClient } from "../src/api.js";
import { AnnotationSession } from "../src/session.js";

const PORT = 18790 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;

let workdir: string;
let server: ChildProcess;

function python(args: string[], input?: string): string {
  return execFileSync("python3", args, { encoding: "utf-8", input });
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "annotate-e2e-"));
  // synthetic corpus: 3 photos, 2 mask variants per photo
  python(
    ["-"],
    `
import numpy as np
from pathlib import Path
from PIL import Image
from woundambit.mask import save_mask
from woundambit.synthetic import ellipse_mask

root = Path(${JSON.stringify(workdir)})
for d in ("images", "masks-a", "masks-b"):
    (root / d).mkdir()
gen = np.random.default_rng(3)
for i in range(3):
    Image.fromarray((gen.random((48, 48)) * 255).astype(np.uint8), mode="L").save(root / "images" / f"img{i}.png")
    save_mask(ellipse_mask((48, 48), (24, 24), 12, 7), root / "masks-a" / f"img{i}.png")
    save_mask(ellipse_mask((48, 48), (24, 24), 14, 9), root / "masks-b" / f"img{i}.png")
`,
  );
  server = spawn("python3", [
    "-m",
    "woundambit.cli",
    "annotate",
    "--images", join(workdir, "images"),
    "--masks", `a=${join(workdir, "masks-a")}`,
    "--masks", `b=${join(workdir, "masks-b")}`,
    "--ratings", join(workdir, "ratings.json"),
    "--port", String(PORT),
    "--seed", "11",
  ]);
  // wait for the API to come up
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${BASE}/api/tasks`);
      if (resp.ok) return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error("annotate server did not start");
});

afterAll(() => {
  server?.kill();
  rmSync(workdir, { recursive: true, force: true });
});

describe("scripted annotation session", () => {
  it("stores blind ratings that eval consumes unchanged", async () => {
    const api = createApiClient(BASE);
    const { tasks, n_variants } = await api.fetchTasks();
    expect(n_variants).toBe(2);
    expect(tasks.map((t) => t.image).sort()).toEqual(["img0", "img1", "img2"]);
    for (const task of tasks) {
      // the task list must not leak variant names
      expect(JSON.stringify(task)).not.toMatch(/\b(a|b)\.png|masks-/);
      expect(task.overlays).toHaveLength(2);
    }

    const session = new AnnotationSession("dr-e2e", tasks);
    while (session.current) {
      const task = session.current;
      task.overlays.forEach((tok, i) =>
        session.setVerdict(task.image, tok, i === 0 ? "good" : "bad"),
      );
      session.setBest(task.image, task.overlays[0]!);
      session.setSize(task.image, 21, 8.5);
      expect(await session.submitCurrent(api)).toBe("stored");
    }
    expect(session.progress).toEqual({ done: 3, total: 3 });

    // a verbatim resubmit is a duplicate, not a second record
    const again = new AnnotationSession("dr-e2e", tasks);
    const t0 = tasks[0]!;
    t0.overlays.forEach((tok, i) => again.setVerdict(t0.image, tok, i === 0 ? "good" : "bad"));
    again.setBest(t0.image, t0.overlays[0]!);
    again.setSize(t0.image, 21, 8.5);
    expect(await again.submitCurrent(api)).toBe("duplicate");

    const ratings = JSON.parse(readFileSync(join(workdir, "ratings.json"), "utf-8"));
    expect(ratings.schema).toBe("ratings/1");
    expect(ratings.records).toHaveLength(3);
    for (const record of ratings.records) {
      expect(Object.keys(record.verdicts).sort()).toEqual(["a", "b"]); // unblinded at rest
    }

    const out = python([
      "-m",
      "woundambit.cli",
      "eval",
      "--ratings", join(workdir, "ratings.json"),
    ]);
    // per-image shuffling means "good"/best went to a or b blind; the two
    // rates still partition 100% good / 100% best across variants
    const rows = out
      .trim()
      .split("\n")
      .slice(1)
      .map((line) => line.trim().split(/\s+/));
    const byVariant = Object.fromEntries(rows.map((r) => [r[0], { cma: Number(r[1]), ecr: Number(r[2]) }]));
    expect(Object.keys(byVariant).sort()).toEqual(["a", "b"]);
    expect(byVariant.a!.cma + byVariant.b!.cma).toBeCloseTo(100);
    expect(byVariant.a!.ecr + byVariant.b!.ecr).toBeCloseTo(100);
  });
});
