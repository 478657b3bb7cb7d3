// Run one JavaScript fixture invocation inside the mocked world.
// Usage: node runner.js <scenario.json>; prints a result JSON to stdout.

const fs = require('fs');
const path = require('path');
const Module = require('module');

const scenario = JSON.parse(fs.readFileSync(process.argv[2], 'utf8'));

globalThis.__SANDBOX_WORLD__ = {
  services: scenario.world || {},
  call_log: [],
};
Object.assign(process.env, scenario.env || {});

const mockPath = path.join(__dirname, 'mock-aws-sdk.js');
const originalResolve = Module._resolveFilename;
Module._resolveFilename = function (request, ...rest) {
  if (request === 'aws-sdk') return mockPath;
  return originalResolve.call(this, request, ...rest);
};

async function main() {
  let output = null;
  let raised = null;
  try {
    const fixture = require(path.resolve(scenario.module_path));
    const handler = fixture.handler || fixture.main;
    output = await handler(scenario.event || {});
  } catch (err) {
    raised = {
      type: err.constructor ? err.constructor.name : 'Error',
      message: String(err.message || err),
      payload: err.payload || null,
    };
    if (err.payload) {
      globalThis.__SANDBOX_WORLD__.call_log.push({
        service: err.payload.service,
        operation: err.payload.action,
        resource: err.payload.resource,
        verdict: 'deny',
        reason: err.payload.reason,
      });
    }
  }
  process.stdout.write(JSON.stringify({
    output,
    raised_error: raised,
    world: globalThis.__SANDBOX_WORLD__.services,
    call_log: globalThis.__SANDBOX_WORLD__.call_log,
  }));
}

main();
