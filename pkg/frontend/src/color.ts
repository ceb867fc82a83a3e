// Fixed color scale: 0 maps to red, 1 to green, linearly in between, so
// screenshots stay comparable across sessions. Row darkness encodes volume.

export function scoreColor(score: number): string {
  const v = Math.max(0, Math.min(1, score));
  const red = Math.round(220 * (1 - v) + 46 * v);
  const green = Math.round(53 * (1 - v) + 160 * v);
  const blue = Math.round(53 * (1 - v) + 67 * v);
  return `rgb(${red}, ${green}, ${blue})`;
}

/** Shade for a row label: the biggest volume is darkest. */
export function volumeShade(volume: number, maxVolume: number): string {
  const share = maxVolume > 0 ? volume / maxVolume : 0;
  const light = Math.round(245 - 130 * share);
  return `rgb(${light}, ${light}, ${light})`;
}

export function labelTextColor(volume: number, maxVolume: number): string {
  const share = maxVolume > 0 ? volume / maxVolume : 0;
  return share > 0.55 ? "#ffffff" : "#1c1c1c";
}
