// Test doubles: an ApiClient backed by a route table instead of a network.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { ApiClient, Fetcher } from "../src/api.js";
import { Snapshot } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export function loadSnapshot(name: string): Snapshot {
  return fixture<Snapshot>(`${name}.snapshot.json`);
}

type Route = (init?: RequestInit) => { status?: number; body: unknown };

export class FakeApi {
  routes = new Map<string, Route>();
  posts: { url: string; body: unknown }[] = [];

  constructor() {
    this.client = new ApiClient("", this.fetcher);
  }

  client: ApiClient;

  private fetcher: Fetcher = async (url, init) => {
    const method = init?.method ?? "GET";
    if (method === "POST") {
      this.posts.push({ url, body: JSON.parse(String(init?.body)) });
    }
    const route = this.routes.get(`${method} ${url}`) ?? this.routes.get(`${method} *`);
    if (!route) {
      return new Response("not found", { status: 404 });
    }
    const { status = 200, body } = route(init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };

  get(url: string, body: unknown, status = 200): void {
    this.routes.set(`GET ${url}`, () => ({ status, body }));
  }

  post(url: string, body: unknown, status = 200): void {
    this.routes.set(`POST ${url}`, () => ({ status, body }));
  }
}
