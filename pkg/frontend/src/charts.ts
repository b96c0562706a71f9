/** Pure chart-option builders: payload data in, echarts option out.
 * No fetching and no analysis math here; the service owns the numbers. */

import type {
  CustomSeriesRenderItemAPI,
  CustomSeriesRenderItemParams,
  EChartsOption,
  SeriesOption,
} from 'echarts';

import { fmt } from './format.js';
import type {
  AblationData,
  BudgetCorrelationData,
  FootprintData,
  ImportancesData,
  ParallelData,
  ParetoData,
  PdpData,
  TrajectoryData,
} from './types.js';

const KIND_STYLE: Record<string, { symbol: string; size: number; color?: string }> = {
  evaluated: { symbol: 'circle', size: 9 },
  incumbent: { symbol: 'pin', size: 22, color: '#d62728' },
  border: { symbol: 'rect', size: 7, color: '#bbbbbb' },
  random_support: { symbol: 'circle', size: 5, color: '#dddddd' },
};

interface ClickableDatum {
  value: number[];
  config_id?: string | null;
}

/** config_id carried by a clicked point, or null for unclickable points. */
export function clickedConfigId(params: unknown): string | null {
  const data = (params as { data?: unknown })?.data;
  if (data && typeof data === 'object' && 'config_id' in data) {
    const id = (data as ClickableDatum).config_id;
    return typeof id === 'string' && id.length > 0 ? id : null;
  }
  return null;
}

export function footprintOption(data: FootprintData, objective: string): EChartsOption {
  const series: SeriesOption[] = [];
  const colored: number[] = [];
  for (const kind of ['random_support', 'border', 'evaluated', 'incumbent']) {
    const pts = data.points.filter((p) => p.kind === kind);
    if (!pts.length) continue;
    const style = KIND_STYLE[kind];
    const byValue = kind === 'evaluated' || kind === 'incumbent';
    if (byValue) colored.push(series.length);
    series.push({
      name: kind.replace('_', ' '),
      type: 'scatter',
      symbol: style.symbol,
      symbolSize: style.size,
      itemStyle: kind === 'incumbent' ? { color: style.color } : byValue ? {} : { color: style.color },
      data: pts.map((p) => ({
        value: [p.x, p.y, p.value ?? NaN],
        config_id: p.config_id,
        kind: p.kind,
      })),
    });
  }
  const values = data.points
    .filter((p) => p.value !== null)
    .map((p) => p.value as number);
  return {
    legend: { top: 0 },
    tooltip: {
      formatter: (p: unknown) => {
        const d = (p as { data: ClickableDatum & { kind?: string } }).data;
        if (!d.config_id) return d.kind === 'border' ? 'border sample' : 'support sample';
        return `${d.config_id}<br/>${objective}: ${fmt(d.value[2])}`;
      },
    },
    visualMap: values.length ? {
      min: Math.min(...values),
      max: Math.max(...values),
      dimension: 2,
      seriesIndex: colored,
      inRange: { color: ['#2166ac', '#f7f7f7', '#b2182b'] },
      right: 0, top: 'middle', calculable: true, text: [objective, ''],
    } : undefined,
    xAxis: { type: 'value', name: 'mds-x', scale: true },
    yAxis: { type: 'value', name: 'mds-y', scale: true },
    series,
  };
}

/** Step line plus a shaded std band when the trajectory comes from a group. */
export function costOverTimeOption(data: TrajectoryData, objective: string): EChartsOption {
  const series: SeriesOption[] = [];
  if (data.std) {
    // band = invisible lower line, stacked delta with filled area
    series.push({
      name: 'band-low', type: 'line', step: 'end', stack: 'band', silent: true,
      symbol: 'none', lineStyle: { opacity: 0 }, tooltip: { show: false },
      data: data.xs.map((x, i) => [x, data.ys[i] - (data.std as number[])[i]]),
    });
    series.push({
      name: 'std', type: 'line', step: 'end', stack: 'band', silent: true,
      symbol: 'none', lineStyle: { opacity: 0 },
      areaStyle: { color: '#1f77b4', opacity: 0.18 },
      data: data.xs.map((x, i) => [x, 2 * (data.std as number[])[i]]),
    });
  }
  series.push({
    name: objective, type: 'line', step: 'end', symbol: 'circle', symbolSize: 5,
    lineStyle: { color: '#1f77b4' }, itemStyle: { color: '#1f77b4' },
    data: data.xs.map((x, i) => [x, data.ys[i]]),
  });
  return {
    tooltip: { trigger: 'axis' },
    xAxis: {
      type: 'value',
      name: data.x_axis === 'time' ? 'wallclock [s]' : 'trials',
      min: 'dataMin', max: 'dataMax',
    },
    yAxis: { type: 'value', name: objective, scale: true },
    series,
  };
}

export function paretoFrontOption(data: ParetoData): EChartsOption {
  const rest = data.points.filter((p) => !p.frontier);
  const front = data.points.filter((p) => p.frontier)
    .sort((a, b) => a.a - b.a);
  const asDatum = (p: ParetoData['points'][number]) => ({
    value: [p.a, p.b], config_id: p.config_id, run_id: p.run_id,
  });
  const formatter = (p: unknown) => {
    const d = (p as { data: ClickableDatum }).data;
    return `${d.config_id}<br/>${data.objective_a}: ${fmt(d.value[0])}` +
           `<br/>${data.objective_b}: ${fmt(d.value[1])}`;
  };
  return {
    legend: { top: 0 },
    tooltip: { formatter },
    xAxis: { type: 'value', name: data.objective_a, scale: true },
    yAxis: { type: 'value', name: data.objective_b, scale: true },
    series: [
      {
        name: 'dominated', type: 'scatter', symbolSize: 7,
        itemStyle: { color: '#9ecae1' }, data: rest.map(asDatum),
      },
      {
        name: 'pareto front', type: 'line', symbol: 'circle', symbolSize: 9,
        step: 'end', itemStyle: { color: '#d62728' }, lineStyle: { color: '#d62728' },
        data: front.map(asDatum),
      },
    ],
  };
}

export function parallelCoordinatesOption(data: ParallelData): EChartsOption {
  const nAxes = data.axes.length;
  const axes = data.axes.map((name, dim) => {
    const values = data.lines.map((l) => l[dim]);
    const categorical = values.some((v) => typeof v === 'string');
    if (categorical) {
      const cats = [...new Set(values.filter((v): v is string => typeof v === 'string'))];
      return { dim, name, type: 'category' as const, data: cats.sort() };
    }
    return { dim, name, type: 'value' as const };
  });
  const objValues = data.lines
    .map((l) => l[nAxes - 1])
    .filter((v): v is number => typeof v === 'number');
  return {
    parallelAxis: axes,
    parallel: { left: 60, right: 120, top: 40, bottom: 24 },
    visualMap: objValues.length ? {
      min: Math.min(...objValues),
      max: Math.max(...objValues),
      dimension: nAxes - 1,
      right: 0, top: 'middle', calculable: true,
      inRange: { color: ['#2166ac', '#f7f7f7', '#b2182b'] },
      text: [data.axes[nAxes - 1], ''],
    } : undefined,
    series: [{
      type: 'parallel', smooth: false,
      lineStyle: { width: 1.5, opacity: 0.55 },
      data: data.lines,
    }],
  };
}

export function pdpOption(data: PdpData, objective: string): EChartsOption {
  const categorical = data.display.some((v) => typeof v === 'string');
  const xs: (string | number)[] = categorical
    ? data.display.map((v) => String(v))
    : (data.display as number[]);
  const point = (y: number, i: number) => (categorical ? [i, y] : [xs[i], y]);
  return {
    tooltip: { trigger: 'axis' },
    xAxis: categorical
      ? { type: 'category', name: data.name, data: xs.map(String) }
      : { type: 'value', name: data.name, min: 'dataMin', max: 'dataMax' },
    yAxis: { type: 'value', name: objective, scale: true },
    series: [
      {
        name: 'band-low', type: 'line', stack: 'band', silent: true, symbol: 'none',
        lineStyle: { opacity: 0 }, tooltip: { show: false },
        data: data.mean.map((m, i) => point(m - data.std[i], i)),
      },
      {
        name: 'std', type: 'line', stack: 'band', silent: true, symbol: 'none',
        lineStyle: { opacity: 0 }, areaStyle: { color: '#2ca02c', opacity: 0.18 },
        data: data.mean.map((_, i) => point(2 * data.std[i], i)),
      },
      {
        name: 'marginal prediction', type: 'line', symbol: 'circle', symbolSize: 5,
        lineStyle: { color: '#2ca02c' }, itemStyle: { color: '#2ca02c' },
        data: data.mean.map((m, i) => point(m, i)),
      },
    ],
  };
}

/** Bars sorted by importance, with whiskers showing the spread across trees. */
export function importancesOption(data: ImportancesData): EChartsOption {
  const order = data.names.map((_, i) => i)
    .sort((a, b) => data.importance[b] - data.importance[a]);
  const names = order.map((i) => data.names[i]);
  const imp = order.map((i) => data.importance[i]);
  const spread = order.map((i) => data.spread[i]);
  const whisker = (params: CustomSeriesRenderItemParams,
                   api: CustomSeriesRenderItemAPI) => {
    const i = params.dataIndex;
    const lo = api.coord([i, Math.max(0, imp[i] - spread[i])]);
    const hi = api.coord([i, imp[i] + spread[i]]);
    const w = 6;
    const line = (x1: number, y1: number, x2: number, y2: number) => ({
      type: 'line' as const,
      shape: { x1, y1, x2, y2 },
      style: { stroke: '#333', lineWidth: 1.2, fill: undefined },
    });
    return {
      type: 'group' as const,
      children: [
        line(hi[0], hi[1], lo[0], lo[1]),
        line(hi[0] - w, hi[1], hi[0] + w, hi[1]),
        line(lo[0] - w, lo[1], lo[0] + w, lo[1]),
      ],
    };
  };
  return {
    tooltip: {
      formatter: (p: unknown) => {
        const q = p as { name: string; dataIndex: number };
        return `${q.name}: ${fmt(imp[q.dataIndex])} &plusmn; ${fmt(spread[q.dataIndex])}`;
      },
    },
    xAxis: { type: 'category', data: names, axisLabel: { rotate: 30 } },
    yAxis: { type: 'value', name: `importance (${data.method})` },
    series: [
      { name: 'importance', type: 'bar', barWidth: '55%', itemStyle: { color: '#1f77b4' }, data: imp },
      { name: 'spread', type: 'custom', renderItem: whisker, data: imp, z: 10 },
    ],
  };
}

/** Prediction after each ablation step, origin first. */
export function ablationPathOption(data: AblationData, objective: string): EChartsOption {
  const labels = ['origin', ...data.steps.map((s) => s.name)];
  const preds = [data.origin_prediction, ...data.steps.map((s) => s.prediction)];
  const values = [null, ...data.steps.map((s) => s.value)];
  return {
    tooltip: {
      formatter: (p: unknown) => {
        const q = p as { name: string; dataIndex: number };
        const v = values[q.dataIndex];
        const head = v === null ? q.name : `${q.name} &rarr; ${fmt(v)}`;
        return `${head}<br/>${objective}: ${fmt(preds[q.dataIndex])}`;
      },
    },
    xAxis: { type: 'category', data: labels, axisLabel: { rotate: 30 } },
    yAxis: { type: 'value', name: `predicted ${objective}`, scale: true },
    series: [{
      type: 'line', symbol: 'diamond', symbolSize: 10,
      label: { show: true, formatter: (p) => fmt((p.value as number), 3) },
      lineStyle: { color: '#9467bd' }, itemStyle: { color: '#9467bd' },
      data: preds,
    }],
  };
}

export function budgetCorrelationOption(data: BudgetCorrelationData): EChartsOption {
  const labels = data.budgets.map((b) => fmt(b));
  const cells: [number, number, number][] = [];
  data.rho.forEach((row, i) => row.forEach((rho, j) => {
    if (rho !== null) cells.push([j, i, rho]);
  }));
  return {
    tooltip: {
      formatter: (p: unknown) => {
        const v = (p as { value: [number, number, number] }).value;
        const n = data.n_common[v[1]][v[0]];
        return `budgets ${labels[v[1]]} vs ${labels[v[0]]}<br/>` +
               `rho: ${fmt(v[2])} (${n} common configs)`;
      },
    },
    grid: { left: 90, right: 110 },
    xAxis: { type: 'category', data: labels, name: 'budget' },
    yAxis: { type: 'category', data: labels, name: 'budget' },
    visualMap: {
      min: -1, max: 1, calculable: true, right: 0, top: 'middle',
      inRange: { color: ['#2166ac', '#f7f7f7', '#b2182b'] },
    },
    series: [{
      type: 'heatmap',
      label: { show: true, formatter: (p) => fmt((p.value as number[])[2], 3) },
      data: cells,
    }],
  };
}
