import { describe, expect, it } from "vitest";

import { renderLegend, renderMap } from "../src/map.js";
import { densityRows, squareZones } from "./helpers.js";

describe("choropleth rendering", () => {
  const zones = squareZones(["z00", "z01", "z02"]);

  it("draws one clickable path per zone", () => {
    const view = renderMap(zones, densityRows(), "count", null);
    expect(view.svg.match(/<path /g)?.length).toBe(3);
    for (const id of ["z00", "z01", "z02"]) {
      expect(view.svg).toContain(`data-zone="${id}"`);
    }
  });

  it("highlights the selected zone", () => {
    const view = renderMap(zones, densityRows(), "count", "z01");
    const selected = view.svg
      .split("<path ")
      .find((chunk) => chunk.includes('data-zone="z01"'));
    expect(selected).toContain('stroke="#1d3557"');
    expect(selected).toContain('stroke-width="3"');
  });

  it("legend carries the payload min and max", () => {
    const view = renderMap(zones, densityRows(), "count", null);
    const legend = renderLegend(view.legend);
    expect(legend).toContain('data-min="0"');
    expect(legend).toContain('data-max="80"');
  });

  it("zones missing from the density payload render as no-data", () => {
    const view = renderMap(zones, densityRows().slice(0, 1), "count", null);
    expect(view.svg).toContain('fill="#e8e8e8"');
  });

  it("zooming to a zone changes the projection", () => {
    const wide = renderMap(zones, densityRows(), "count", null, null);
    const zoomed = renderMap(zones, densityRows(), "count", null, "z01");
    expect(zoomed.svg).not.toBe(wide.svg);
  });

  it("sentiment metric uses the anchored diverging palette", () => {
    const view = renderMap(zones, densityRows(), "sentiment", null);
    expect(view.legend.metric).toBe("sentiment");
    expect(view.legend.min).toBeCloseTo(-0.25);
    expect(view.legend.max).toBeCloseTo(0.5);
  });
});
