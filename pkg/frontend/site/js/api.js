/**
 * Typed client for the inference service. In-flight requests are
 * deduplicated by body hash so repeated identical queries share one
 * round trip.
 */
export class ServiceError extends Error {
    constructor(status, detail) {
        super(detail);
        this.status = status;
    }
}
export class ApiClient {
    constructor(base = "", fetchImpl = (...args) => fetch(...args)) {
        this.base = base;
        this.fetchImpl = fetchImpl;
        this.inflight = new Map();
    }
    async request(path, init) {
        const response = await this.fetchImpl(this.base + path, init);
        if (!response.ok) {
            let detail = `${response.status}`;
            try {
                const body = await response.json();
                if (body && typeof body.detail === "string")
                    detail = body.detail;
            }
            catch {
                /* non-JSON error body */
            }
            throw new ServiceError(response.status, detail);
        }
        return (await response.json());
    }
    health() {
        return this.request("/v1/health");
    }
    model() {
        return this.request("/v1/model");
    }
    scenarios() {
        return this.request("/v1/scenarios");
    }
    predict(evidence, targets) {
        const payload = JSON.stringify({ evidence, targets: targets ?? null });
        const pending = this.inflight.get(payload);
        if (pending)
            return pending;
        const promise = this.request("/v1/predict", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: payload,
        }).finally(() => this.inflight.delete(payload));
        this.inflight.set(payload, promise);
        return promise;
    }
}
