import init, { CoreDemo, EpidemicDemo, equilibrium_profile } from "./pkg/rhsim_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// viridis anchors, linearly interpolated
const STOPS = [
  [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
];

function colour(t) {
  const x = Math.min(Math.max(t, 0), 1) * (STOPS.length - 1);
  const i = Math.min(Math.floor(x), STOPS.length - 2);
  const f = x - i;
  return STOPS[i].map((a, k) => Math.round(a + f * (STOPS[i + 1][k] - a)));
}

// First index runs left to right, second bottom to top.
function heatmap(canvas, values, n) {
  canvas.width = n;
  canvas.height = n;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  let lo = Infinity, hi = -Infinity;
  for (const v of values) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  const span = hi - lo > 0 ? hi - lo : 1;
  for (let p = 0; p < values.length; p++) {
    const i1 = Math.floor(p / n), i2 = p % n;
    const o = 4 * ((n - 1 - i2) * n + i1);
    const [r, g, b] = colour((values[p] - lo) / span);
    img.data[o] = r; img.data[o + 1] = g; img.data[o + 2] = b; img.data[o + 3] = 255;
  }
  ctx.putImageData(img, 0, 0);
  return [lo, hi];
}

function shared() {
  return [parseInt($("n").value, 10), num("length"), num("alpha"), num("gamma"), num("epsilon"), num("sigma")];
}

function report(id, f) {
  try { f(); } catch (e) { $(id).textContent = `error: ${e.message ?? e}`; }
}

let core = null;
let coreTimer = null;

function drawCore() {
  const n = parseInt($("n").value, 10);
  heatmap($("core-home"), core.at_home(), n);
  heatmap($("core-travel"), core.travelers(), n);
  heatmap($("core-total"), core.total(), n);
  $("core-status").textContent =
    `t = ${core.time().toFixed(2)}   conservation residual = ${core.conservation_residual().toExponential(2)}`;
}

function resetCore() {
  report("core-status", () => {
    const [n, length, ...rest] = shared();
    core = new CoreDemo(n, length, ...rest, 0.1 * length);
    drawCore();
  });
}

function toggle(timer, button, tick) {
  if (timer) { clearInterval(timer); button.textContent = "Play"; return null; }
  button.textContent = "Pause";
  return setInterval(tick, 60);
}

let epi = null;
let epiTimer = null;
let curve = [];

function drawCurve() {
  const c = $("epi-curve");
  c.width = 384; c.height = 256;
  const ctx = c.getContext("2d");
  ctx.fillStyle = "#fff"; ctx.fillRect(0, 0, c.width, c.height);
  if (curve.length < 2) return;
  const tMax = curve[curve.length - 1][0];
  const yMax = Math.max(...curve.map((p) => p[1])) || 1;
  ctx.strokeStyle = "#b2182b"; ctx.lineWidth = 2; ctx.beginPath();
  curve.forEach(([t, y], k) => {
    const x = 8 + (c.width - 16) * (t / tMax);
    const yy = c.height - 8 - (c.height - 16) * (y / yMax);
    k ? ctx.lineTo(x, yy) : ctx.moveTo(x, yy);
  });
  ctx.stroke();
}

function drawEpi() {
  const n = parseInt($("n").value, 10);
  heatmap($("epi-home"), epi.infected_at_home(), n);
  heatmap($("epi-travel"), epi.infected_travelers(), n);
  const [s1, i1, s2, i2] = epi.totals();
  curve.push([epi.time(), i1 + i2]);
  drawCurve();
  $("epi-status").textContent =
    `t = ${epi.time().toFixed(2)}   S = ${(s1 + s2).toFixed(4)}   I = ${(i1 + i2).toFixed(4)}`;
}

function resetEpi() {
  report("epi-status", () => {
    const [n, length, ...rest] = shared();
    epi = new EpidemicDemo(n, length, ...rest, num("kappa1"), num("kappa2"), num("nu"));
    curve = [];
    drawEpi();
  });
}

await init();

$("core-reset").onclick = resetCore;
$("core-step").onclick = () => report("core-status", () => { core.advance(20, 0.05); drawCore(); });
$("core-play").onclick = () => {
  coreTimer = toggle(coreTimer, $("core-play"), () => report("core-status", () => { core.advance(1, 0.05); drawCore(); }));
};
$("eq-draw").onclick = () => report("eq-status", () => {
  const [n, ...rest] = shared();
  const chi = equilibrium_profile(n, ...rest);
  const [lo, hi] = heatmap($("eq-profile"), chi, n);
  $("eq-status").textContent = `min = ${lo.toExponential(2)}   max = ${hi.toExponential(2)}`;
});
$("epi-reset").onclick = resetEpi;
$("epi-play").onclick = () => {
  epiTimer = toggle(epiTimer, $("epi-play"), () => report("epi-status", () => { epi.advance(1, 0.05); drawEpi(); }));
};

resetCore();
$("eq-draw").onclick();
resetEpi();
