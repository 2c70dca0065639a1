import init, { decompose, bubble_profile, growth_trace } from "./pkg/degen_calc_web.js";

const $ = (id) => document.getElementById(id);
const int = (id) => parseInt($(id).value, 10);

function show(out, f) {
  out.classList.remove("err");
  try {
    out.textContent = f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

function runDecompose() {
  show($("dec-out"), () => {
    const r = JSON.parse(decompose($("dec-poly").value, int("dec-n"), $("dec-a").value));
    const lines = [`input: ${r.input}`];
    for (const c of r.components) {
      lines.push(`degree ${c.degree}:`);
      for (const part of c.parts) lines.push(`  h_${part.i} (degree ${part.degree}) = ${part.text}`);
    }
    lines.push(`exact reconstruction: ${r.reconstruction_exact}`);
    return lines.join("\n");
  });
}

function plot(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const xmax = xs[xs.length - 1];
  const mid = h / 2;
  ctx.strokeStyle = "#aaa";
  ctx.beginPath();
  ctx.moveTo(0, mid);
  ctx.lineTo(w, mid);
  ctx.stroke();
  for (const { ys, color } of series) {
    const m = Math.max(...ys.map(Math.abs)) || 1;
    ctx.strokeStyle = color;
    ctx.beginPath();
    ys.forEach((y, i) => {
      const px = (xs[i] / xmax) * w;
      const py = mid - (y / m) * (mid - 8);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
}

function runBubble() {
  show($("bub-out"), () => {
    const r = JSON.parse(
      bubble_profile(int("bub-n"), $("bub-a").value, int("bub-p"), $("bub-t").value, parseFloat($("bub-r").value), 400),
    );
    plot($("bub-plot"), r.radii, [
      { ys: r.values, color: "#1f5fbf" },
      { ys: r.monotone_quantity, color: "#c0392b" },
    ]);
    const worst = Math.max(...r.monotone_quantity);
    return `K = ${r.K}   c0 = ${r.c0}   s = ${r.s}   critical exponent = ${r.alpha_crit}\n` +
      `largest value of the red curve: ${worst.toExponential(3)}`;
  });
}

function runGrowth() {
  show($("gr-out"), () => {
    const r = JSON.parse(growth_trace(int("gr-n"), $("gr-a").value, int("gr-p"), $("gr-alpha").value, int("gr-k")));
    const rows = r.sigma.map((s, k) =>
      `${String(k).padStart(3)}  σ=${s.padEnd(14)} b=${r.b[k].padEnd(14)} r/r0=${r.r[k].toFixed(6)}  log=${r.log_blow_up[k].toFixed(3)}`);
    return [
      `closed forms match: ${r.closed_forms_match}   r_k monotone and below c = ${r.c.toFixed(6)}: ${r.monotone_and_bounded}`,
      ...rows,
    ].join("\n");
  });
}

await init();
$("dec-run").onclick = runDecompose;
$("bub-run").onclick = runBubble;
$("gr-run").onclick = runGrowth;
runDecompose();
runBubble();
runGrowth();
