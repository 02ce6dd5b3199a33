import init, {
  distance_distribution, crossing_exponents, entropy_trace, renyi_profile,
} from "./pkg/lrmipt_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Draws one or more series [{xs, ys, color}] with linear or log axes.
function plot(canvas, series, { logx = false, logy = false, dots = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const tx = (v) => (logx ? Math.log10(v) : v);
  const ty = (v) => (logy ? Math.log10(v) : v);
  const pts = series.flatMap((s) => s.xs.map((x, i) => [tx(x), ty(s.ys[i])]))
    .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
  if (!pts.length) return;
  let [x0, x1] = [Math.min(...pts.map((p) => p[0])), Math.max(...pts.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...pts.map((p) => p[1])), Math.max(...pts.map((p) => p[1]))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const X = (v) => pad + ((v - x0) / (x1 - x0)) * (W - 2 * pad);
  const Y = (v) => H - pad - ((v - y0) / (y1 - y0)) * (H - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  const fmt = (v, log) => (log ? "1e" + v.toFixed(1) : v.toPrecision(3));
  ctx.fillText(fmt(x0, logx), pad, H - pad + 14);
  ctx.fillText(fmt(x1, logx), W - pad - 30, H - pad + 14);
  ctx.fillText(fmt(y0, logy), 2, H - pad);
  ctx.fillText(fmt(y1, logy), 2, pad + 4);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    ctx.beginPath();
    let open = false;
    s.xs.forEach((x, i) => {
      const a = tx(x), b = ty(s.ys[i]);
      if (!Number.isFinite(a) || !Number.isFinite(b)) { open = false; return; }
      if (dots) ctx.fillRect(X(a) - 2, Y(b) - 2, 4, 4);
      if (open) ctx.lineTo(X(a), Y(b)); else ctx.moveTo(X(a), Y(b));
      open = true;
    });
    ctx.stroke();
  }
}

let exponents = null;

function drawDistances() {
  const l = num("d-l"), alpha = num("d-alpha");
  $("d-alpha-val").textContent = alpha.toFixed(2);
  const p = Array.from(distance_distribution(l, alpha));
  plot($("d-dist"), [{ xs: p.map((_, i) => i + 1), ys: p, color: "#1f5fbf" }], { logx: true, logy: true });
  if (!exponents) exponents = Array.from(crossing_exponents(0, 4, 41, 4096));
  const as = exponents.filter((_, i) => i % 2 === 0);
  const mus = exponents.filter((_, i) => i % 2 === 1);
  plot($("d-exp"), [
    { xs: as, ys: as.map((a) => Math.max(2 - a, 0)), color: "#bbb" },
    { xs: as, ys: mus, color: "#c0392b" },
    { xs: [alpha, alpha], ys: [0, 2], color: "#1f5fbf" },
  ]);
}

function runTrace() {
  const s = Array.from(entropy_trace(num("t-l"), num("t-alpha"), num("t-p"), num("t-steps"), BigInt(num("t-seed"))));
  plot($("t-plot"), [{ xs: s.map((_, i) => i + 1), ys: s, color: "#1f5fbf" }]);
}

function runRenyi() {
  const s = Array.from(renyi_profile(num("h-l"), num("h-alpha"), num("h-g")));
  plot($("h-plot"), [{ xs: s.map((_, i) => i), ys: s, color: "#27ae60" }], { dots: true });
}

await init();
$("d-alpha").addEventListener("input", drawDistances);
$("d-l").addEventListener("change", drawDistances);
$("t-run").addEventListener("click", runTrace);
$("h-run").addEventListener("click", runRenyi);
drawDistances();
runTrace();
runRenyi();
