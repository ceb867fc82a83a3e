import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(body: unknown, status = 200) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), { status });
  };
  return { impl, calls };
}

describe("ApiClient", () => {
  it("unwraps the data side of the envelope", async () => {
    const { impl } = fakeFetch({ ok: true, data: { status: "ok", session: null } });
    const client = new ApiClient("", impl);
    expect(await client.health()).toEqual({ status: "ok", session: null });
  });

  it("raises ApiError with the server's code on error envelopes", async () => {
    const { impl } = fakeFetch(
      { ok: false, error: { code: "UnknownView", message: "no view named 'x'" } },
      404,
    );
    const client = new ApiClient("", impl);
    await expect(client.heatmap("x", "Category")).rejects.toMatchObject({
      code: "UnknownView",
    });
  });

  it("wraps network failures as Unreachable", async () => {
    const client = new ApiClient("", async () => {
      throw new Error("ECONNREFUSED");
    });
    await expect(client.health()).rejects.toBeInstanceOf(ApiError);
    await expect(client.health()).rejects.toMatchObject({ code: "Unreachable" });
  });

  it("omits an empty filter from the heatmap body", async () => {
    const { impl, calls } = fakeFetch({ ok: true, data: {} });
    const client = new ApiClient("", impl);
    await client.heatmap("std", "Category", { equals: [], score_quantile: null });
    const body = JSON.parse(calls[0].init?.body as string);
    expect(body).toEqual({ view: "std", feature: "Category" });
  });

  it("encodes scores paging in the query string", async () => {
    const { impl, calls } = fakeFetch({ ok: true, data: { rows: [] } });
    const client = new ApiClient("", impl);
    await client.scores("std", 10, 5);
    expect(calls[0].url).toBe("/api/scores?view=std&offset=10&limit=5");
  });
});
