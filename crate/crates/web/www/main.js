// Sliders are on a log10 scale so one control covers several decades.
import init, { pmfCurve, moments, mgfCurve } from "./pkg/wright_poisson_web.js";

const $ = (id) => document.getElementById(id);
const sliders = ["alpha", "beta", "m"];
const fmt = (x) => (Math.abs(x) >= 1e-4 && Math.abs(x) < 1e6 ? x.toPrecision(6) : x.toExponential(4));

function params() {
  const p = {};
  for (const k of sliders) {
    p[k] = Number((10 ** Number($(k).value)).toPrecision(4));
    $(`${k}-out`).textContent = p[k];
  }
  return p;
}

function setup(canvas) {
  const dpr = window.devicePixelRatio || 1;
  const { width, height } = canvas.getBoundingClientRect();
  canvas.width = width * dpr;
  canvas.height = height * dpr;
  const ctx = canvas.getContext("2d");
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  ctx.clearRect(0, 0, width, height);
  ctx.font = "11px system-ui, sans-serif";
  return { ctx, width, height, pad: 34 };
}

function axes({ ctx, width, height, pad }, xLabel, yMax) {
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#555";
  ctx.beginPath();
  ctx.moveTo(pad, 8);
  ctx.lineTo(pad, height - pad);
  ctx.lineTo(width - 8, height - pad);
  ctx.stroke();
  ctx.fillText(xLabel, width - 20, height - pad + 24);
  ctx.fillText(fmt(yMax), 2, 14);
}

function drawPmf(curve) {
  const g = setup($("pmf"));
  const { ctx, width, height, pad } = g;
  const n = curve.r.length;
  const yMax = Math.max(...curve.pmf);
  const w = (width - pad - 8) / n;
  const y = (v, top) => height - pad - (v / top) * (height - pad - 8);
  axes(g, "r", yMax);
  ctx.fillStyle = "#3b6ea8";
  curve.pmf.forEach((p, i) => {
    const top = y(p, yMax);
    ctx.fillRect(pad + i * w + w * 0.1, top, Math.max(w * 0.8, 1), height - pad - top);
  });
  ctx.strokeStyle = "#d2691e";
  ctx.beginPath();
  curve.cdf.forEach((c, i) => {
    const x = pad + (i + 0.5) * w;
    i ? ctx.lineTo(x, y(c, 1)) : ctx.moveTo(x, y(c, 1));
  });
  ctx.stroke();
  ctx.fillStyle = "#555";
  const ticks = Math.min(n, 8);
  for (let k = 0; k < ticks; k++) {
    const i = Math.round((k * (n - 1)) / Math.max(ticks - 1, 1));
    ctx.fillText(String(curve.r[i]), pad + (i + 0.3) * w, height - pad + 12);
  }
}

function drawMgf(curve) {
  const g = setup($("mgf"));
  const { ctx, width, height, pad } = g;
  const logs = curve.mgf.map(Math.log10);
  const lo = Math.min(...logs);
  const hi = Math.max(...logs);
  const span = hi - lo || 1;
  const x = (t) => pad + ((t - curve.t[0]) / (curve.t.at(-1) - curve.t[0])) * (width - pad - 8);
  const y = (l) => height - pad - ((l - lo) / span) * (height - pad - 8);
  axes(g, "t", curve.mgf.at(-1));
  ctx.fillText(fmt(curve.mgf[0]), 2, height - pad);
  ctx.fillText("log scale", pad + 6, 14);
  ctx.strokeStyle = "#3b6ea8";
  ctx.lineWidth = 2;
  ctx.beginPath();
  curve.t.forEach((t, i) => (i ? ctx.lineTo(x(t), y(logs[i])) : ctx.moveTo(x(t), y(logs[i]))));
  ctx.stroke();
  ctx.lineWidth = 1;
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(x(0), 8);
  ctx.lineTo(x(0), height - pad);
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText("-1", pad - 4, height - pad + 12);
  ctx.fillText("0", x(0) - 3, height - pad + 12);
  ctx.fillText("1", width - 14, height - pad + 12);
}

function showMoments(s) {
  const rows = [
    ["mean", s.mean_series, s.mean_closed_i, s.mean_closed_ii],
    ["E[X²]", s.m2_series, s.m2_closed_i, s.m2_closed_ii],
    ["variance", s.variance, null, null],
    ["std. dev.", s.std_dev, null, null],
    ["max spread", s.max_method_spread, null, null],
  ];
  $("moments").querySelector("tbody").innerHTML = rows
    .map(([name, ...v]) => `<tr><td>${name}</td>${v.map((x) => `<td>${x === null ? "" : fmt(x)}</td>`).join("")}</tr>`)
    .join("");
}

function update() {
  const { alpha, beta, m } = params();
  try {
    const pmf = JSON.parse(pmfCurve(alpha, beta, m, 0));
    const mom = JSON.parse(moments(alpha, beta, m));
    const mgf = JSON.parse(mgfCurve(alpha, beta, m, -1, 1, 101));
    drawPmf(pmf);
    drawMgf(mgf);
    showMoments(mom);
    $("error").textContent = mom.consistent ? "" : "moment methods disagree beyond 1e-9";
  } catch (e) {
    $("error").textContent = String(e.message ?? e);
  }
}

await init();
for (const k of sliders) $(k).addEventListener("input", update);
window.addEventListener("resize", update);
update();
