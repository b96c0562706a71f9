/** Plot export: SVG text from any chart, PNG via an offscreen canvas. */

import type { ECharts } from 'echarts';

/** Serialized SVG of a rendered chart, legends and axes included. */
export function chartSvg(chart: ECharts): string {
  const ssr = (chart as ECharts & { renderToSVGString?: () => string });
  if (typeof ssr.renderToSVGString === 'function') {
    return ssr.renderToSVGString();
  }
  const svg = chart.getDom()?.querySelector('svg');
  if (!svg) throw new Error('chart has no svg root; use the svg renderer');
  return new XMLSerializer().serializeToString(svg);
}

export function download(filename: string, href: string): void {
  const a = document.createElement('a');
  a.href = href;
  a.download = filename;
  // Safari needs the element attached for the download attribute to work
  document.body.appendChild(a);
  a.click();
  setTimeout(() => a.remove(), 100);
}

export function exportSvg(chart: ECharts, filename: string): void {
  const blob = new Blob([chartSvg(chart)], { type: 'image/svg+xml' });
  const url = URL.createObjectURL(blob);
  download(filename.endsWith('.svg') ? filename : `${filename}.svg`, url);
  setTimeout(() => URL.revokeObjectURL(url), 1000);
}

export async function exportPng(chart: ECharts, filename: string): Promise<void> {
  const svgData = chartSvg(chart);
  const dataUrl = `data:image/svg+xml;base64,${btoa(unescape(encodeURIComponent(svgData)))}`;
  const img = new Image();
  await new Promise<void>((resolve, reject) => {
    img.onload = () => resolve();
    img.onerror = () => reject(new Error('failed to rasterize chart'));
    img.src = dataUrl;
  });
  const scale = 2;
  const canvas = document.createElement('canvas');
  canvas.width = chart.getWidth() * scale;
  canvas.height = chart.getHeight() * scale;
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error('canvas 2d context unavailable');
  ctx.fillStyle = '#ffffff';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.scale(scale, scale);
  ctx.drawImage(img, 0, 0);
  download(filename.endsWith('.png') ? filename : `${filename}.png`,
           canvas.toDataURL('image/png'));
}
