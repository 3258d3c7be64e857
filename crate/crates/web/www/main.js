import init, { g_measure_density, leaf_path, stationarity_demo } from './pkg/hirsch_web.js';

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = '#999';
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
}

function drawDensity() {
  const canvas = $('gm-plot');
  const ctx = canvas.getContext('2d');
  const { width: w, height: h } = canvas;
  let d;
  try {
    d = g_measure_density(num('gm-a'), num('gm-level'));
  } catch (e) {
    axes(ctx, w, h);
    ctx.fillText(e.message, 10, 20);
    return;
  }
  const max = Math.max(...d);
  axes(ctx, w, h);
  ctx.fillStyle = '#3b6ea8';
  const bw = w / d.length;
  d.forEach((v, j) => {
    const bh = (v / max) * (h - 20);
    ctx.fillRect(j * bw, h - bh, Math.max(bw, 1), bh);
  });
  ctx.fillStyle = '#222';
  ctx.fillText(`max density ${max.toFixed(3)}`, 8, 14);
}

function drawPath() {
  const canvas = $('lp-plot');
  const ctx = canvas.getContext('2d');
  const { width: w, height: h } = canvas;
  const tEnd = num('lp-t');
  let rows;
  try {
    rows = leaf_path(num('lp-a'), num('lp-z'), tEnd, 1e-2, BigInt(num('lp-seed')));
  } catch (e) {
    axes(ctx, w, h);
    ctx.fillText(e.message, 10, 20);
    return;
  }
  axes(ctx, w, h);
  for (let i = 0; i < rows.length; i += 5) {
    const [t, label, cyl] = [rows[i], rows[i + 1], rows[i + 2]];
    ctx.fillStyle = cyl === 1 ? '#c0392b' : '#27ae60';
    ctx.fillRect((t / tEnd) * (w - 2), (1 - label) * (h - 2), 2, 2);
  }
}

function runStationarity(useG) {
  $('st-out').textContent = 'running...';
  // let the status paint before the blocking call
  setTimeout(() => {
    try {
      const r = JSON.parse(stationarity_demo(num('st-a'), useG, num('st-n'), num('st-t'), 42n));
      $('st-out').textContent =
        `${r.measure}: ${r.pass ? 'PASS' : 'REJECT'}\n` +
        `KS ${r.ks_statistic.toFixed(4)} (threshold ${r.ks_threshold.toFixed(4)})\n` +
        `W1 ${r.wasserstein1.toFixed(5)} (band ${r.bootstrap_band.toFixed(5)})`;
    } catch (e) {
      $('st-out').textContent = e.message;
    }
  }, 20);
}

await init();
$('gm-run').onclick = drawDensity;
$('lp-run').onclick = drawPath;
$('st-g').onclick = () => runStationarity(true);
$('st-leb').onclick = () => runStationarity(false);
drawDensity();
drawPath();
