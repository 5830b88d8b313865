import init, { operations, compareCase, networkImages } from "./pkg/ebsl_web.js";

const fmt = (v, k = 4) => Number(v).toFixed(k);

function values(section) {
  const out = {};
  for (const el of section.querySelectorAll("input, select")) {
    out[el.name] = el.type === "number" ? Number(el.value) : el.value;
  }
  return out;
}

function table(head, rows) {
  const th = head.map((h) => `<th>${h}</th>`).join("");
  const body = rows.map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`).join("");
  return `<table><tr>${th}</tr>${body}</table>`;
}

function show(section, json, render) {
  const out = section.querySelector(".out");
  const data = JSON.parse(json);
  if (data.error) {
    out.innerHTML = `<p class="error">${data.error}</p>`;
    return;
  }
  out.innerHTML = render(data);
}

function opinionRow(name, s) {
  const { b, d, u } = s.opinion;
  return [name, fmt(b), fmt(d), fmt(u), fmt(s.evidence.p), fmt(s.evidence.n)];
}

const head = ["", "b", "d", "u", "p", "n"];

function updateOps(section) {
  const v = values(section);
  show(section, operations(v.xp, v.xn, v.yp, v.yn, v.c, v.theta), (d) => {
    const rows = [
      opinionRow("x", d.x),
      opinionRow("y", d.y),
      opinionRow("x ⊕ y", d.consensus),
      opinionRow("x ⊗ y", d.legacy_discount),
      opinionRow("x ⊠ y, g = x_b", d.discount_xb),
      opinionRow("x ⊠ y, g = √x_b", d.discount_sqrt_xb),
    ];
    if (d.discount_odot) rows.push(opinionRow("x ⊙ y", d.discount_odot));
    const note = d.discount_odot ? "" : `<p>⊙ needs θ above ${fmt(d.theta_bound, 2)}.</p>`;
    return table(head, rows) + note;
  });
}

function updateCompare(section) {
  const v = values(section);
  show(section, compareCase(v.case, v.wp, v.wn, v.theta), (d) =>
    table(
      [...head, "iterations"],
      d.results.map((r) => [...opinionRow(r.method, r), r.iterations ?? ""]),
    ),
  );
}

function paint(canvas, n, pixels) {
  canvas.width = n;
  canvas.height = n;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  pixels.forEach((g, i) => {
    img.data.set([g, g, g, 255], 4 * i);
  });
  ctx.putImageData(img, 0, 0);
}

function updateNetwork(section) {
  const v = values(section);
  show(section, networkImages(v.n, v.density, v.max, v.seed, v.g === "sqrt"), (d) => {
    paint(section.querySelector(".direct"), d.n, d.direct);
    paint(section.querySelector(".referral"), d.n, d.referral);
    return `<p>${d.converged ? "converged" : "did not converge"} after ${d.iterations} iterations</p>`;
  });
}

await init();
for (const [id, update] of [["ops", updateOps], ["cmp", updateCompare], ["net", updateNetwork]]) {
  const section = document.getElementById(id);
  section.addEventListener("input", () => update(section));
  update(section);
}
