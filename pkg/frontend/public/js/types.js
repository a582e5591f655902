// Wire types for the /v1 JSON API (mirrors the server's published schema).
export {};
