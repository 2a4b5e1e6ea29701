import { vi } from 'vitest';

export interface RecordedCall {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: string | null;
}

export interface CannedResponse {
  status?: number;
  json?: unknown;
  text?: string;
}

type Router = (call: RecordedCall) => CannedResponse | undefined;

function toResponse(canned: CannedResponse) {
  const status = canned.status ?? 200;
  const payload = canned.text ?? JSON.stringify(canned.json ?? null);
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => JSON.parse(payload),
    text: async () => payload,
  } as Response;
}

// Installs a fetch stub. Returns the recorded calls so tests can assert on
// exactly what went over the wire.
export function stubFetch(route: Router): RecordedCall[] {
  const calls: RecordedCall[] = [];
  vi.stubGlobal('fetch', async (input: RequestInfo | URL, init?: RequestInit) => {
    const call: RecordedCall = {
      url: String(input),
      method: init?.method ?? 'GET',
      headers: Object.fromEntries(
        Object.entries((init?.headers as Record<string, string>) ?? {})
          .map(([k, v]) => [k.toLowerCase(), v])
      ),
      body: typeof init?.body === 'string' ? init.body : null,
    };
    calls.push(call);
    const canned = route(call);
    if (canned === undefined) {
      throw new Error(`unrouted request: ${call.method} ${call.url}`);
    }
    return toResponse(canned);
  });
  return calls;
}

export async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}
