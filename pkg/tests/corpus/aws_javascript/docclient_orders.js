const AWS = require('aws-sdk');

const db = new AWS.DynamoDB.DocumentClient();

exports.handler = async (event) => {
  const table = process.env.ORDERS_TABLE;
  await db.put({ TableName: table, Item: { id: event.id, total: event.total } }).promise();
  const fetched = await db.get({ TableName: table, Key: { id: event.id } }).promise();
  return fetched.Item;
};
