import init, { one_or_all, rate_curve, sweep_demo } from "./pkg/mrs_web.js";

const $ = (id) => document.getElementById(id);

function show(id, fn) {
  const out = $(id);
  out.classList.remove("error");
  try {
    const value = JSON.parse(fn());
    out.textContent = JSON.stringify(value, null, 2);
    return value;
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message || e);
    return null;
  }
}

// Draws series of [x, y] points; `step` series are drawn as staircases.
function plot(canvas, series, xMax) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, m = 40;
  ctx.clearRect(0, 0, w, h);
  let yMax = 0;
  for (const s of series) for (const [, y] of s.points) yMax = Math.max(yMax, y);
  yMax = yMax > 0 ? yMax * 1.1 : 1;
  const sx = (x) => m + (x / xMax) * (w - 2 * m);
  const sy = (y) => h - m - (y / yMax) * (h - 2 * m);

  ctx.strokeStyle = "#000";
  ctx.beginPath();
  ctx.moveTo(m, m / 2);
  ctx.lineTo(m, h - m);
  ctx.lineTo(w - m / 2, h - m);
  ctx.stroke();
  ctx.fillStyle = "#000";
  ctx.font = "12px sans-serif";
  for (let i = 0; i <= 4; i++) {
    ctx.fillText((xMax * i / 4).toFixed(2), sx(xMax * i / 4) - 10, h - m + 16);
    ctx.fillText((yMax * i / 4).toFixed(2), 4, sy(yMax * i / 4) + 4);
  }
  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    ctx.beginPath();
    s.points.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(sx(x), sy(y));
      else if (s.step) { ctx.lineTo(sx(x), sy(s.points[i - 1][1])); ctx.lineTo(sx(x), sy(y)); }
      else ctx.lineTo(sx(x), sy(y));
    });
    ctx.stroke();
    if (s.bars) {
      s.points.forEach(([x, y], i) => {
        ctx.beginPath();
        ctx.arc(sx(x), sy(y), 2.5, 0, 2 * Math.PI);
        ctx.fill();
        ctx.beginPath();
        ctx.moveTo(sx(x), sy(y - s.bars[i]));
        ctx.lineTo(sx(x), sy(y + s.bars[i]));
        ctx.stroke();
      });
    }
    ctx.fillText(s.label, w - m - 110, m / 2 + 14 * (k + 1));
  });
}

function stepPoints(fn, xMax) {
  const bps = fn.breakpoints.map(Number);
  const vals = fn.values.map(Number);
  const pts = [[0, 0]];
  bps.forEach((b, i) => pts.push([Math.min(b, xMax), vals[i]]));
  pts.push([xMax, vals[vals.length - 1] ?? 0]);
  return pts;
}

function parseQ(s) {
  const [a, b] = String(s).split("/");
  return b === undefined ? Number(a) : Number(a) / Number(b);
}

function runOneOrAll() {
  show("ooa-out", () => one_or_all($("ooa-w").value, $("ooa-r0").value, $("ooa-r").value));
}

function runRateCurve() {
  const v = show("rc-out", () => rate_curve($("rc-bp").value, $("rc-val").value));
  if (!v) return;
  const r = { breakpoints: v.rate.breakpoints.map(parseQ), values: v.rate.values.map(parseQ) };
  const series = [{ label: "rate r(c)", color: "#1f5fbf", step: true, points: stepPoints(r, 1) }];
  plot($("rc-plot"), series, 1);
}

function runSweep() {
  const num = (id) => Number($(id).value);
  const v = show("sw-out", () =>
    sweep_demo(num("sw-k"), num("sw-l"), num("sw-l2"), num("sw-points"), num("sw-n"), num("sw-trials"), num("sw-seed")));
  if (!v) return;
  const pts = v.points;
  plot($("sw-plot"), [
    { label: "empirical", color: "#c0392b", points: pts.map((p) => [p.c, p.mean_rate]), bars: pts.map((p) => p.std_rate) },
    { label: "theory", color: "#27864a", step: true, points: [[0, 0], ...pts.map((p) => [p.c, p.theory])] },
  ], 1);
}

await init();
$("ooa-run").onclick = runOneOrAll;
$("rc-run").onclick = runRateCurve;
$("sw-run").onclick = () => { $("sw-out").textContent = "running..."; setTimeout(runSweep, 10); };
runOneOrAll();
runRateCurve();
