import assert from "node:assert/strict";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import test from "node:test";

import { parseCsv, SchemaError } from "../src/csv";
import { loglogSlope, renderFigure } from "../src/figures";
import { main } from "../src/render";

const dir = mkdtempSync(join(tmpdir(), "plots-"));

function write(name: string, text: string): string {
  const p = join(dir, name);
  writeFileSync(p, text);
  return p;
}

// fixtures follow the primary component's CSV schemas
const wzCsv = write(
  "wong_zakai_convergence.csv",
  "level,endpoint_rms,density_rel_rms\r\n" +
    "8,0.369,0.02\r\n16,0.252,0.014\r\n32,0.148,0.01\r\n64,0.1,0.007\r\n128,0.047,0.005\r\n"
);
const stabCsv = write(
  "stability_s_of_delta.csv",
  "level,delta,S,se,envelope,l1\r\n" +
    "8,0.01,5.1,0.2,5.4,0.065\r\n8,0.03,2.2,0.15,2.1,0.065\r\n" +
    "8,0.1,0.52,0.05,0.75,0.065\r\n8,0.3,0.07,0.01,0.3,0.065\r\n"
);
const rhoCsv = write(
  "density_moments_rho_samples.csv",
  "rho_T\r\n" +
    Array.from({ length: 500 }, (_, i) => (0.6 + (i % 90) / 100).toFixed(3)).join("\r\n") +
    "\r\n"
);
const trajCsv = write(
  "flow_demo_trajectory.csv",
  "path_index,t,x0,x1,x2,log_density\r\n" +
    Array.from({ length: 101 }, (_, i) => {
      const t = i / 100;
      const a = 2 * Math.PI * t;
      return `0,${t},${Math.cos(a) * 0.9},${Math.sin(a) * 0.9},0.436,${0.1 * t}`;
    }).join("\r\n") +
    "\r\n"
);

test("csv parser handles quotes and CRLF", () => {
  const t = parseCsv('a,b\r\n"x,1",2\r\n"he said ""hi""",3\r\n');
  assert.deepEqual(t.columns, ["a", "b"]);
  assert.deepEqual(t.rows, [["x,1", "2"], ['he said "hi"', "3"]]);
});

test("loglog slope recovers a power law", () => {
  const x = [8, 16, 32, 64, 128];
  const y = x.map((v) => 3 * Math.pow(v, -0.5));
  assert.ok(Math.abs(loglogSlope(x, y) + 0.5) < 1e-12);
});

test("all four figure kinds render", () => {
  const cases: Array<[string, string]> = [
    ["loglog-convergence", wzCsv],
    ["envelope", stabCsv],
    ["histogram", rhoCsv],
    ["trajectory", trajCsv],
  ];
  for (const [kind, input] of cases) {
    const svg = renderFigure({ kind: kind as never, input, output: "x.svg" });
    assert.ok(svg.startsWith("<svg"), `${kind} produces svg`);
    assert.ok(svg.includes("</svg>"));
  }
});

test("convergence figure annotates the slope derived from the CSV", () => {
  const svg = renderFigure({
    kind: "loglog-convergence",
    input: wzCsv,
    output: "x.svg",
  });
  const t = parseCsv(readFileSync(wzCsv, "utf8"));
  const level = t.rows.map((r) => Number(r[0]));
  const rms = t.rows.map((r) => Number(r[1]));
  const slope = loglogSlope(level, rms);
  assert.ok(svg.includes(`fitted slope ${slope.toFixed(3)}`));
});

test("histogram annotations are CSV-derived moments", () => {
  const svg = renderFigure({ kind: "histogram", input: rhoCsv, output: "x.svg" });
  const rho = parseCsv(readFileSync(rhoCsv, "utf8")).rows.map((r) => Number(r[0]));
  const m1 = rho.reduce((a, b) => a + b, 0) / rho.length;
  assert.ok(svg.includes(`E rho^1 = ${m1.toFixed(4)}`));
});

test("envelope figure marks points against the curve", () => {
  const svg = renderFigure({ kind: "envelope", input: stabCsv, output: "x.svg" });
  assert.ok(svg.includes("within 2 SE") || svg.includes("above"));
});

test("empty csv is a schema error", () => {
  const p = write("empty.csv", "");
  assert.throws(() => renderFigure({ kind: "histogram", input: p, output: "x.svg" }),
    SchemaError);
});

test("missing columns are listed", () => {
  const p = write("bad.csv", "foo,bar\r\n1,2\r\n");
  try {
    renderFigure({ kind: "loglog-convergence", input: p, output: "x.svg" });
    assert.fail("expected a schema error");
  } catch (err) {
    assert.ok(err instanceof SchemaError);
    assert.match((err as Error).message, /endpoint_rms/);
  }
});

test("cli renders a full spec and is idempotent", () => {
  const out1 = join(dir, "wz.svg");
  const spec = write(
    "spec.json",
    JSON.stringify([
      { kind: "loglog-convergence", input: wzCsv, output: out1 },
      { kind: "trajectory", input: trajCsv, output: join(dir, "traj.svg") },
    ])
  );
  assert.equal(main(["--spec", spec]), 0);
  const first = readFileSync(out1, "utf8");
  assert.equal(main(["--spec", spec]), 0);
  assert.equal(readFileSync(out1, "utf8"), first);
});

test("cli exits 2 on empty csv input", () => {
  const p = write("empty2.csv", "");
  const spec = write(
    "spec2.json",
    JSON.stringify({ kind: "histogram", input: p, output: join(dir, "h.svg") })
  );
  assert.equal(main(["--spec", spec]), 2);
});

test("cli exits 2 on unknown kind", () => {
  const spec = write(
    "spec3.json",
    JSON.stringify({ kind: "pie", input: wzCsv, output: join(dir, "p.svg") })
  );
  assert.equal(main(["--spec", spec]), 2);
});
