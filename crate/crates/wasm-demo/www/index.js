import init, { renyi_curve, exp_norm_qubit, divergence_profile } from "./pkg/qexp_wasm.js";

const ALPHAS = Array.from({ length: 60 }, (_, i) => 1.001 + i * (3 - 1.001) / 59);

function slider(prefix, name, value, min, max) {
  const id = `${prefix}-${name}`;
  return `<label for="${id}">${name}</label>` +
    `<input type="range" id="${id}" min="${min}" max="${max}" step="0.01" value="${value}">` +
    `<output id="${id}-out">${value}</output><br>`;
}

function buildControls() {
  for (const el of document.querySelectorAll(".bloch, .pauli")) {
    const init = el.dataset.init.split(",").map(Number);
    const names = el.classList.contains("bloch") ? ["x", "y", "z"] : ["a0", "ax", "ay", "az"];
    const range = el.classList.contains("bloch") ? [-0.99, 0.99] : [-2, 2];
    el.innerHTML = `<strong>${el.dataset.label}</strong><br>` +
      names.map((n, i) => slider(el.dataset.prefix, n, init[i], range[0], range[1])).join("");
  }
}

function read(prefix, names) {
  return new Float64Array(names.map((n) => {
    const input = document.getElementById(`${prefix}-${n}`);
    document.getElementById(`${prefix}-${n}-out`).textContent = Number(input.value).toFixed(2);
    return Number(input.value);
  }));
}

const bloch = (p) => read(p, ["x", "y", "z"]);
const pauli = (p) => read(p, ["a0", "ax", "ay", "az"]);

function plot(canvas, xs, ys, color) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const finite = ys.filter(Number.isFinite);
  if (finite.length === 0) return;
  const lo = Math.min(0, ...finite);
  const hi = Math.max(...finite) || 1;
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const px = (x) => 30 + (w - 40) * (x - x0) / (x1 - x0);
  const py = (y) => h - 20 - (h - 30) * (y - lo) / (hi - lo || 1);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(30, py(0));
  ctx.lineTo(w - 10, py(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText(hi.toPrecision(3), 2, 12);
  ctx.fillText(x0.toFixed(2), 30, h - 4);
  ctx.fillText(x1.toFixed(2), w - 40, h - 4);
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, i) => (i === 0 ? ctx.moveTo(px(x), py(ys[i])) : ctx.lineTo(px(x), py(ys[i]))));
  ctx.stroke();
}

const fmt = (x) => (Number.isFinite(x) ? x.toPrecision(8) : String(x));

function guarded(f) {
  return () => {
    const err = document.getElementById("error");
    try {
      f();
      err.textContent = "";
    } catch (e) {
      err.textContent = String(e);
    }
  };
}

const updateRenyi = guarded(() => {
  const out = renyi_curve(bloch("rw"), bloch("rr"), new Float64Array(ALPHAS));
  plot(document.getElementById("renyi-plot"), ALPHAS, Array.from(out.slice(1)), "#1f6feb");
  document.getElementById("renyi-s").textContent = fmt(out[0]);
  document.getElementById("renyi-f2").textContent = fmt(renyi_curve(bloch("rw"), bloch("rr"), new Float64Array([2]))[1]);
});

const updateNorm = guarded(() => {
  const [norm, phi2] = exp_norm_qubit(bloch("nr"), pauli("na"));
  document.getElementById("norm-value").textContent = fmt(norm);
  document.getElementById("norm-phi").textContent = fmt(phi2);
});

const updateDivergence = guarded(() => {
  const steps = 50;
  const ys = Array.from(divergence_profile(bloch("dr"), pauli("dh"), pauli("dk"), steps));
  const ts = ys.map((_, i) => i / steps);
  plot(document.getElementById("div-plot"), ts, ys, "#d1242f");
  document.getElementById("div-end").textContent = fmt(ys[ys.length - 1]);
});

async function main() {
  await init();
  buildControls();
  const wire = (section, update) => {
    document.getElementById(section).addEventListener("input", update);
    update();
  };
  wire("renyi", updateRenyi);
  wire("norm", updateNorm);
  wire("divergence", updateDivergence);
}

main();
