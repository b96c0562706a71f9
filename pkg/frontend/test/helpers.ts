import { readFileSync } from 'node:fs';

import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';

import type { Payload } from '../src/types.js';

export function loadPayload<T>(name: string): Payload<T> {
  const url = new URL(`./fixtures/payloads/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, 'utf-8'));
}

/** Server-side render an option to an SVG string. */
export function renderSvg(option: EChartsOption, width = 800, height = 520): string {
  const chart = echarts.init(null, undefined, { renderer: 'svg', ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
