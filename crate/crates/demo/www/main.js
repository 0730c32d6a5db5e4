import init, { profile_curve, sweep_sigma1, surface_spectrum } from "./pkg/warped_steklov_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(40, 10, w - 50, h - 40);
}

function polyline(canvas, xs, ys, dots) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  axes(ctx, w, h);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => 40 + ((x - x0) / (x1 - x0 || 1)) * (w - 50);
  const sy = (y) => h - 30 - ((y - y0) / (y1 - y0 || 1)) * (h - 40);
  ctx.strokeStyle = "#1a5fb4";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  if (!dots) ctx.stroke();
  ctx.fillStyle = "#1a5fb4";
  if (dots) xs.forEach((x, i) => ctx.fillRect(sx(x) - 2, sy(ys[i]) - 2, 4, 4));
  ctx.fillStyle = "#333";
  ctx.fillText(y1.toPrecision(4), 2, 16);
  ctx.fillText(y0.toPrecision(4), 2, h - 30);
  ctx.fillText(x0.toPrecision(3), 40, h - 12);
  ctx.fillText(x1.toPrecision(3), w - 40, h - 12);
}

function guard(errEl, f) {
  try {
    errEl.textContent = "";
    f();
  } catch (e) {
    errEl.textContent = String(e.message || e);
  }
}

function runProfile() {
  guard($("p-err"), () => {
    const pts = profile_curve(num("p-eps"), num("p-delta"), 2001);
    const t = [], y = [];
    for (let i = 0; i < pts.length; i += 2) { t.push(pts[i]); y.push(pts[i + 1]); }
    polyline($("p-plot"), t, y, false);
  });
}

function runSweep() {
  guard($("s-out"), () => {
    const eps = $("s-eps").value.split(",").map(Number);
    const s = sweep_sigma1(new Float64Array(eps), num("s-delta"), num("s-n"), num("s-k"));
    polyline($("s-plot"), eps.map((e) => -Math.log2(e)), Array.from(s), true);
    $("s-out").textContent = eps.map((e, i) => `ε = ${e}\tσ₁ = ${s[i].toFixed(6)}`).join("\n");
  });
}

function runSurface() {
  guard($("c-out"), () => {
    const v = Array.from(surface_spectrum(num("c-len"), num("c-bump"), num("c-count")));
    polyline($("c-plot"), v, v.map(() => 0), true);
    $("c-out").textContent = v.map((x, i) => `σ${i} = ${x.toFixed(6)}`).join("\n");
  });
}

await init();
$("p-run").onclick = runProfile;
$("s-run").onclick = runSweep;
$("c-run").onclick = runSurface;
runProfile();
