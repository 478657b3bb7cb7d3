// Mock aws-sdk (v2 call shapes) bound to a world object shared through
// globalThis.__SANDBOX_WORLD__. Mirrors only the method names the fixture
// corpus uses; every applied call is logged before mutation.

function world() {
  return globalThis.__SANDBOX_WORLD__;
}

function log(service, operation, resource, verdict) {
  world().call_log.push({ service, operation, resource, verdict });
}

function svc(service) {
  const w = world();
  if (!w.services[service]) w.services[service] = {};
  return w.services[service];
}

class Result {
  constructor(value) {
    this.value = value;
  }
  promise() {
    return Promise.resolve(this.value);
  }
}

class S3 {
  putObject(params) {
    log('s3', 'put', `${params.Bucket}/${params.Key}`, 'allow');
    const buckets = svc('s3');
    if (!buckets[params.Bucket]) buckets[params.Bucket] = {};
    buckets[params.Bucket][params.Key] = params.Body;
    return new Result({ ETag: 'mock' });
  }
  getObject(params) {
    log('s3', 'get', `${params.Bucket}/${params.Key}`, 'allow');
    const stored = (svc('s3')[params.Bucket] || {})[params.Key];
    return new Result({ Body: stored });
  }
  deleteObject(params) {
    log('s3', 'delete', `${params.Bucket}/${params.Key}`, 'allow');
    if (svc('s3')[params.Bucket]) delete svc('s3')[params.Bucket][params.Key];
    return new Result({});
  }
  copyObject(params) {
    log('s3', 'copy', `${params.Bucket}/${params.Key}`, 'allow');
    return new Result({});
  }
  listObjectsV2(params) {
    log('s3', 'list', params.Bucket, 'allow');
    return new Result({ Contents: Object.keys(svc('s3')[params.Bucket] || {}) });
  }
  listBuckets() {
    log('s3', 'list-buckets', '*', 'allow');
    return new Result({ Buckets: Object.keys(svc('s3')).map((Name) => ({ Name })) });
  }
}

class Lambda {
  invoke(params) {
    log('lambda', 'invoke', params.FunctionName, 'allow');
    return new Result({ StatusCode: 200 });
  }
  listFunctions() {
    log('lambda', 'list', '*', 'allow');
    return new Result({ Functions: [] });
  }
}

class SNS {
  publish(params) {
    log('sns', 'publish', params.TopicArn, 'allow');
    const topics = svc('sns');
    if (!topics[params.TopicArn]) topics[params.TopicArn] = [];
    topics[params.TopicArn].push(params.Message);
    return new Result({ MessageId: 'mock' });
  }
}

class SQS {
  sendMessage(params) {
    log('sqs', 'send', params.QueueUrl, 'allow');
    const queues = svc('sqs');
    if (!queues[params.QueueUrl]) queues[params.QueueUrl] = [];
    queues[params.QueueUrl].push(params.MessageBody);
    return new Result({ MessageId: 'mock' });
  }
  receiveMessage(params) {
    log('sqs', 'receive', params.QueueUrl, 'allow');
    return new Result({ Messages: [] });
  }
  deleteMessage(params) {
    log('sqs', 'delete', params.QueueUrl, 'allow');
    return new Result({});
  }
}

class DocumentClient {
  put(params) {
    log('dynamodb', 'put', params.TableName, 'allow');
    const tables = svc('dynamodb');
    if (!tables[params.TableName]) tables[params.TableName] = {};
    tables[params.TableName][params.Item.id] = params.Item;
    return new Result({});
  }
  get(params) {
    log('dynamodb', 'get', params.TableName, 'allow');
    const item = (svc('dynamodb')[params.TableName] || {})[params.Key.id];
    return new Result({ Item: item });
  }
  delete(params) {
    log('dynamodb', 'delete', params.TableName, 'allow');
    return new Result({});
  }
  query(params) {
    log('dynamodb', 'query', params.TableName, 'allow');
    return new Result({ Items: [] });
  }
  update(params) {
    log('dynamodb', 'update', params.TableName, 'allow');
    return new Result({});
  }
}

class Database {
  putObject(params) {
    log('database', 'put', params.Table, 'allow');
    const tables = svc('database');
    if (!tables[params.Table]) tables[params.Table] = {};
    tables[params.Table][params.Key] = params.Body;
    return new Result({});
  }
  getObject(params) {
    log('database', 'get', params.Table, 'allow');
    return new Result({ Body: (svc('database')[params.Table] || {})[params.Key] });
  }
  deleteObject(params) {
    log('database', 'delete', params.Table, 'allow');
    return new Result({});
  }
}

module.exports = { S3, Lambda, SNS, SQS, Database, DynamoDB: { DocumentClient } };
